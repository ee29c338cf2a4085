#pragma once

#include <cstdint>
#include <functional>

#include "predprey/arena/arena.hpp"
#include "predprey/experiments/controller.hpp"
#include "predprey/experiments/design.hpp"
#include "predprey/nn/checkpoint.hpp"

namespace predprey::experiments {

inline constexpr long kEvalSteps = 10'000;

struct EvaluationOptions {
  long eval_steps = kEvalSteps;
  std::uint64_t seed = 0;
  arena::ArenaConfig arena;
  PolicyMode mode = PolicyMode::Sampled;
};

struct EvaluationResult {
  long captures = 0;
  long truncations = 0;
  long steps = 0;
  // Episodes begun, including the one cut off by the step budget.
  long episodes = 0;
  long predator_visible_steps = 0;
};

struct EvaluationHooks {
  std::function<void(int episode, const arena::EnvState&)> on_episode;
  std::function<void(int episode, const arena::EnvState& after, arena::Action predator, arena::Action prey,
                     const arena::StepResult&)>
      on_step;
};

// Runs exactly options.eval_steps environment steps, resetting on capture or
// truncation.
EvaluationResult run_evaluation(Controller& predator, Controller& prey, const arena::AgentSpec& predator_spec,
                                const arena::AgentSpec& prey_spec, const EvaluationOptions& options,
                                const EvaluationHooks* hooks = nullptr);

// Checks that a checkpoint was trained as `role` with `design`; throws
// std::invalid_argument on any mismatch.
void check_checkpoint_design(const nn::Checkpoint& ckpt, arena::AgentKind role, const ppo::AgentDesign& design);

// Predator vs prey from checkpoints. The predator must match `design`; the
// prey plays with the design stored in its own checkpoint.
EvaluationResult evaluate(const nn::Checkpoint& predator, const nn::Checkpoint& prey, const DesignPoint& design,
                          const EvaluationOptions& options, const EvaluationHooks* hooks = nullptr);

// As above with the predator's vision replaced by `eval_vision` (training
// metadata is still checked against `design`).
EvaluationResult evaluate_with_vision(const nn::Checkpoint& predator, const nn::Checkpoint& prey,
                                      const DesignPoint& design, arena::VisionArea eval_vision,
                                      const EvaluationOptions& options, const EvaluationHooks* hooks = nullptr);

}  // namespace predprey::experiments

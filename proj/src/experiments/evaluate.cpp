#include "predprey/experiments/evaluate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "predprey/ppo/trainer.hpp"

namespace predprey::experiments {

namespace {

constexpr std::uint64_t kEvalEnvStream = 10;
constexpr std::uint64_t kEvalPredatorStream = 11;
constexpr std::uint64_t kEvalPreyStream = 12;

}  // namespace

EvaluationResult run_evaluation(Controller& predator, Controller& prey, const arena::AgentSpec& predator_spec,
                                const arena::AgentSpec& prey_spec, const EvaluationOptions& options,
                                const EvaluationHooks* hooks) {
  if (options.eval_steps < 0) throw std::invalid_argument("eval_steps must be non-negative");
  arena::Rng env_rng = ppo::derive_stream(options.seed, kEvalEnvStream);

  EvaluationResult result;
  int episode = 0;
  arena::EnvState env;
  arena::Observation pred_obs;
  arena::Observation prey_obs;
  bool need_reset = true;

  while (result.steps < options.eval_steps) {
    if (need_reset) {
      env = arena::reset(env_rng, options.arena, predator_spec, prey_spec);
      pred_obs = arena::make_observation(env.predator, env.prey, env);
      prey_obs = arena::make_observation(env.prey, env.predator, env);
      predator.begin_episode();
      prey.begin_episode();
      result.episodes += 1;
      if (hooks != nullptr && hooks->on_episode) hooks->on_episode(episode, env);
      need_reset = false;
    }
    if (pred_obs.adversary_visible) result.predator_visible_steps += 1;
    const arena::Action a_pred = predator.act(pred_obs);
    const arena::Action a_prey = prey.act(prey_obs);
    arena::StepResult res = arena::step(env, a_pred, a_prey);
    result.steps += 1;
    if (hooks != nullptr && hooks->on_step) hooks->on_step(episode, env, a_pred, a_prey, res);

    if (res.outcome.captured) result.captures += 1;
    if (res.outcome.truncated) result.truncations += 1;
    if (res.outcome.done()) {
      need_reset = true;
      ++episode;
    } else {
      pred_obs = std::move(res.predator_obs);
      prey_obs = std::move(res.prey_obs);
    }
  }
  return result;
}

void check_checkpoint_design(const nn::Checkpoint& ckpt, arena::AgentKind role, const ppo::AgentDesign& design) {
  const nlohmann::json& m = ckpt.metadata;
  const std::string expected_role(arena::to_string(role));
  if (m.value("role", std::string()) != expected_role)
    throw std::invalid_argument("checkpoint role '" + m.value("role", std::string()) + "' is not " + expected_role);
  ppo::AgentDesign stored;
  try {
    stored = ppo::design_from_metadata(m);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("checkpoint lacks design metadata: ") + e.what());
  }
  const bool same_speed = std::abs(stored.spec.speed - design.spec.speed) < 1e-9;
  const bool same_gamma = std::abs(stored.gamma - design.gamma) < 1e-9;
  const bool same_vision =
      stored.spec.vision.is_unbounded() == design.spec.vision.is_unbounded() &&
      (stored.spec.vision.is_unbounded() || std::abs(stored.spec.vision.area() - design.spec.vision.area()) < 1e-9);
  if (!same_speed || !same_gamma || !same_vision)
    throw std::invalid_argument(expected_role + " checkpoint was trained with a different design");
}

EvaluationResult evaluate(const nn::Checkpoint& predator, const nn::Checkpoint& prey, const DesignPoint& design,
                          const EvaluationOptions& options, const EvaluationHooks* hooks) {
  return evaluate_with_vision(predator, prey, design, design.vision, options, hooks);
}

EvaluationResult evaluate_with_vision(const nn::Checkpoint& predator, const nn::Checkpoint& prey,
                                      const DesignPoint& design, arena::VisionArea eval_vision,
                                      const EvaluationOptions& options, const EvaluationHooks* hooks) {
  check_checkpoint_design(predator, arena::AgentKind::Predator, design.agent());
  if (prey.metadata.value("role", std::string()) != "prey")
    throw std::invalid_argument("prey checkpoint does not carry the prey role");
  const ppo::AgentDesign prey_design = ppo::design_from_metadata(prey.metadata);
  if (predator.params.config().obs_dim != options.arena.observation_dim() ||
      prey.params.config().obs_dim != options.arena.observation_dim())
    throw std::invalid_argument("checkpoint observation size does not match the arena");

  PolicyController pred_ctl(predator.params, options.mode, ppo::derive_stream(options.seed, kEvalPredatorStream));
  PolicyController prey_ctl(prey.params, options.mode, ppo::derive_stream(options.seed, kEvalPreyStream));
  const arena::AgentSpec pred_spec{design.speed, eval_vision};
  return run_evaluation(pred_ctl, prey_ctl, pred_spec, prey_design.spec, options, hooks);
}

}  // namespace predprey::experiments

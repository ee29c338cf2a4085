#pragma once

#include <functional>
#include <random>

#include "predprey/arena/arena.hpp"
#include "predprey/nn/params.hpp"

namespace predprey::experiments {

// Chooses one agent's actions during evaluation.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void begin_episode() = 0;
  virtual arena::Action act(const arena::Observation& obs) = 0;
};

enum class PolicyMode { Sampled, Greedy };

// Runs a trained network with its own recurrent state and action history.
class PolicyController : public Controller {
 public:
  PolicyController(nn::ParamSet<float> params, PolicyMode mode, arena::Rng rng);

  void begin_episode() override;
  arena::Action act(const arena::Observation& obs) override;

 private:
  nn::ParamSet<float> params_;
  PolicyMode mode_;
  arena::Rng rng_;
  nn::Mat<float> hidden_;
  nn::Mat<float> obs_;
  int prev_action_ = 0;
};

class ScriptedController : public Controller {
 public:
  using Policy = std::function<arena::Action(const arena::Observation&)>;
  explicit ScriptedController(Policy policy) : policy_(std::move(policy)) {}

  void begin_episode() override {}
  arena::Action act(const arena::Observation& obs) override { return policy_(obs); }

 private:
  Policy policy_;
};

// Turns toward a visible adversary (within `tolerance` radians) and moves
// forward; keeps going straight while it is hidden.
arena::Action pursue(const arena::Observation& obs, double tolerance = 0.2);
// Turns away from a visible adversary.
arena::Action flee(const arena::Observation& obs);

}  // namespace predprey::experiments

#pragma once

#include <stdexcept>
#include <vector>

#include "predprey/nn/policy.hpp"
#include "predprey/ppo/config.hpp"

namespace predprey::ppo {

// Thrown when a loss, gradient or network output stops being finite.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything the objective needs, per sample in t*N + n order.
template <typename S>
struct PpoBatch {
  nn::SequenceInput<S> sequence;
  std::vector<int> actions;
  std::vector<int> location_labels;
  nn::Vec<S> old_log_probs;
  nn::Vec<S> advantages;
  nn::Vec<S> returns;
};

template <typename S>
struct LossBreakdown {
  S action = 0;
  S value = 0;
  S entropy = 0;
  S location = 0;
  S total = 0;
  double clip_fraction = 0.0;
};

template <typename S>
struct LossEvaluation {
  LossBreakdown<S> losses;
  nn::SequenceOutput<S> output;
  nn::OutputGrads<S> output_grads;
};

// Replays the window through the network and evaluates
//   action + value_coef * value - entropy_coef * entropy + location_coef * location
// with the clipped surrogate action loss, unclipped squared-error value loss,
// mean policy entropy and mean location cross-entropy, together with the
// gradient of the total w.r.t. each head's outputs.
template <typename S>
LossEvaluation<S> ppo_losses(const nn::ParamSet<S>& params, const PpoBatch<S>& batch, const PPOConfig& config);

// ppo_losses followed by BPTT; `grads` is overwritten.
template <typename S>
LossBreakdown<S> ppo_gradient(const nn::ParamSet<S>& params, const PpoBatch<S>& batch, const PPOConfig& config,
                              nn::ParamSet<S>& grads);

}  // namespace predprey::ppo

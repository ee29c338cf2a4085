#pragma once

#include <vector>

#include "predprey/nn/policy.hpp"

namespace predprey::ppo {

// One agent's share of a T-step rollout over N envs. Per-sample arrays are
// row-major [T, N] so that sample (t, n) sits at t*N + n, the column order of
// nn::SequenceInput.
struct RolloutBuffer {
  int steps = 0;
  int envs = 0;
  nn::Mat<float> observations;  // [obs_dim, T*N]
  std::vector<int> prev_actions;
  std::vector<int> actions;
  std::vector<int> location_labels;
  nn::RowMat<float> log_probs;  // [T, N]
  nn::RowMat<float> values;     // [T+1, N]; row T is the bootstrap value
  nn::RowMat<float> rewards;    // [T, N]
  nn::RowMat<float> masks;      // [T+1, N]; 0 where a new episode starts
  nn::Mat<float> initial_hidden;

  static RolloutBuffer make(int steps, int envs, int obs_dim, int hidden_width);

  std::size_t index(int t, int n) const { return static_cast<std::size_t>(t) * envs + n; }
  int samples() const { return steps * envs; }

  // Replay input: observations, previous actions, masks rows 0..T-1 and the
  // hidden state the window started from.
  template <typename S>
  nn::SequenceInput<S> sequence_input() const;
};

}  // namespace predprey::ppo

#pragma once

#include <array>
#include <span>
#include <vector>

#include "predprey/nn/layers.hpp"

namespace predprey::nn {

template <typename S>
struct PolicyOutput {
  Mat<S> action_logits;    // [actions, batch]
  Mat<S> values;           // [1, batch]
  Mat<S> location_logits;  // [144, batch]
  Mat<S> hidden;           // [hidden_width, batch]
};

// Concatenates observations with the embedding row of each previous action
// (config.no_action_index() at episode start).
template <typename S>
Mat<S> gru_input(const ParamSet<S>& params, const Mat<S>& observations, std::span<const int> prev_actions);

// One recurrent step for a batch. The caller applies episode masks to `hidden`.
template <typename S>
PolicyOutput<S> forward(const ParamSet<S>& params, const Mat<S>& observations,
                        std::span<const int> prev_actions, const Mat<S>& hidden);

// A T-step replay over a batch of N sequences. Column t*N + n holds step t of
// sequence n. masks(t, n) == 0 zeroes the hidden state entering step t.
template <typename S>
struct SequenceInput {
  int steps = 0;
  int batch = 0;
  Mat<S> observations;
  std::vector<int> prev_actions;
  Mat<S> masks;
  Mat<S> initial_hidden;

  Eigen::Index column(int t, int n) const { return static_cast<Eigen::Index>(t) * batch + n; }
};

template <typename S>
struct SequenceTape {
  std::vector<GruCache<S>> gru;
  Mat<S> hidden;  // GRU outputs, [hidden_width, T*N]
  std::array<MlpCache<S>, kHeadCount> heads;
};

template <typename S>
struct SequenceOutput {
  Mat<S> action_logits;
  Mat<S> values;
  Mat<S> location_logits;
  SequenceTape<S> tape;
};

template <typename S>
SequenceOutput<S> forward_sequence(const ParamSet<S>& params, const SequenceInput<S>& input);

// Gradients of a scalar loss w.r.t. each head output, same shapes as the
// corresponding SequenceOutput members.
template <typename S>
struct OutputGrads {
  Mat<S> action_logits;
  Mat<S> values;
  Mat<S> location_logits;
};

// Backpropagation through time. Accumulates into `grads`; no gradient flows
// into the initial hidden state or across a zero mask.
template <typename S>
void backward_sequence(const ParamSet<S>& params, const SequenceInput<S>& input,
                       const SequenceOutput<S>& output, const OutputGrads<S>& dout, ParamSet<S>& grads);

}  // namespace predprey::nn

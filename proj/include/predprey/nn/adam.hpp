#pragma once

#include "predprey/nn/params.hpp"

namespace predprey::nn {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-5;
};

struct AdamState {
  Vec<float> first_moment;
  Vec<float> second_moment;
  long step = 0;

  static AdamState zeros(Eigen::Index size);
};

// Bias-corrected Adam: p -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(ParamSet<float>& params, const ParamSet<float>& grads, AdamState& state, double lr,
               const AdamOptions& options = {});

template <typename S>
S global_norm(const ParamSet<S>& grads);

// Rescales every gradient by max_norm / norm when the global L2 norm exceeds
// max_norm. Returns the norm before clipping.
template <typename S>
S clip_grad_norm(ParamSet<S>& grads, S max_norm);

}  // namespace predprey::nn

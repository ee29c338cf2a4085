#pragma once

#include "predprey/nn/params.hpp"

namespace predprey::ppo {

// Discounted returns A_t = R_t + gamma * mask_{t+1} * A_{t+1}, seeded with the
// bootstrap values in row T. `rewards` is [T, N]; `masks` and `values` are
// [T+1, N], where masks(t+1, n) == 0 means step t ended an episode.
nn::RowMat<float> compute_returns(const nn::RowMat<float>& rewards, const nn::RowMat<float>& masks,
                                  const nn::RowMat<float>& values, double gamma);

// returns - values[0..T), optionally shifted and scaled to zero mean and unit
// (population) variance over the whole batch.
nn::RowMat<float> compute_advantages(const nn::RowMat<float>& returns, const nn::RowMat<float>& values,
                                     bool normalize);

}  // namespace predprey::ppo

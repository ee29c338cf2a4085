#pragma once

#include "predprey/nn/params.hpp"

namespace predprey::nn {

// Activations are column-major [features, batch].
template <typename S>
struct GruCache {
  Mat<S> x;
  Mat<S> h;
  Mat<S> r;
  Mat<S> z;
  Mat<S> n;
  Mat<S> hn;  // U_n h + b_n, before the reset gate
};

// r = sig(W_r x + U_r h + b_r), z = sig(W_z x + U_z h + b_z),
// n = tanh(W_n x + r * (U_n h + b_n)), h' = (1 - z) * n + z * h.
template <typename S>
Mat<S> gru_forward(const ParamSet<S>& params, const Mat<S>& x, const Mat<S>& h, GruCache<S>* cache);

// Pre-activation gradients of one GRU step. Rows of `input_pre` are
// [da_r; da_z; da_n] (what multiplies x), rows of `hidden_pre` are
// [da_r; da_z; d(hn)] (what multiplies h).
template <typename S>
struct GruGateGrads {
  Mat<S> input_pre;
  Mat<S> hidden_pre;
  Mat<S> dh_direct;
};

template <typename S>
GruGateGrads<S> gru_gate_grads(const GruCache<S>& cache, const Mat<S>& dh_next);

// Accumulates weight gradients into `grads`; writes input/hidden gradients
// when the pointers are non-null.
template <typename S>
void gru_backward(const ParamSet<S>& params, const GruCache<S>& cache, const Mat<S>& dh_next,
                  ParamSet<S>& grads, Mat<S>* dx, Mat<S>* dh);

// Hidden activations of a 3-layer tanh MLP head (the output layer is linear).
template <typename S>
struct MlpCache {
  Mat<S> a0;
  Mat<S> a1;
};

template <typename S>
Mat<S> mlp_forward(const ParamSet<S>& params, Head head, const Mat<S>& input, MlpCache<S>* cache);

// Returns the gradient w.r.t. `input`.
template <typename S>
Mat<S> mlp_backward(const ParamSet<S>& params, Head head, const Mat<S>& input, const MlpCache<S>& cache,
                    const Mat<S>& dout, ParamSet<S>& grads);

}  // namespace predprey::nn

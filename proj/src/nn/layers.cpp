#include "predprey/nn/layers.hpp"

#include <stdexcept>

namespace predprey::nn {

namespace {

template <typename S>
Mat<S> logistic(const Mat<S>& a) {
  return (S(1) + (-a.array()).exp()).inverse().matrix();
}

}  // namespace

template <typename S>
Mat<S> gru_forward(const ParamSet<S>& params, const Mat<S>& x, const Mat<S>& h, GruCache<S>* cache) {
  const ParamLayout& layout = params.layout();
  const Eigen::Index width = layout.config.hidden_width;
  if (x.rows() != layout.config.gru_input_dim() || h.rows() != width || x.cols() != h.cols())
    throw std::invalid_argument("gru_forward: shape mismatch");

  const auto w_input = params.matrix(layout.gru_weight_input);
  const auto w_hidden = params.matrix(layout.gru_weight_hidden);
  const auto bias = params.vector(layout.gru_bias);

  Mat<S> gx = w_input * x;
  Mat<S> gh = w_hidden * h;
  gh.colwise() += bias;

  Mat<S> r = logistic<S>(gx.topRows(width) + gh.topRows(width));
  Mat<S> z = logistic<S>(gx.middleRows(width, width) + gh.middleRows(width, width));
  Mat<S> hn = gh.bottomRows(width);
  Mat<S> n = (gx.bottomRows(width).array() + r.array() * hn.array()).tanh().matrix();
  Mat<S> h_next = ((S(1) - z.array()) * n.array() + z.array() * h.array()).matrix();

  if (cache != nullptr) {
    cache->x = x;
    cache->h = h;
    cache->r = std::move(r);
    cache->z = std::move(z);
    cache->n = std::move(n);
    cache->hn = std::move(hn);
  }
  return h_next;
}

template <typename S>
GruGateGrads<S> gru_gate_grads(const GruCache<S>& c, const Mat<S>& dh_next) {
  const Eigen::Index width = c.h.rows();
  const Eigen::Index batch = c.h.cols();
  const auto r = c.r.array();
  const auto z = c.z.array();
  const auto n = c.n.array();
  const auto dh = dh_next.array();

  const auto da_n = dh * (S(1) - z) * (S(1) - n * n);
  const auto da_z = dh * (c.h.array() - n) * z * (S(1) - z);
  const auto da_r = da_n * c.hn.array() * r * (S(1) - r);

  GruGateGrads<S> g;
  g.input_pre.resize(3 * width, batch);
  g.input_pre.topRows(width) = da_r.matrix();
  g.input_pre.middleRows(width, width) = da_z.matrix();
  g.input_pre.bottomRows(width) = da_n.matrix();
  g.hidden_pre.resize(3 * width, batch);
  g.hidden_pre.topRows(2 * width) = g.input_pre.topRows(2 * width);
  g.hidden_pre.bottomRows(width) = (da_n * r).matrix();
  g.dh_direct = (dh * z).matrix();
  return g;
}

template <typename S>
void gru_backward(const ParamSet<S>& params, const GruCache<S>& cache, const Mat<S>& dh_next,
                  ParamSet<S>& grads, Mat<S>* dx, Mat<S>* dh) {
  const ParamLayout& layout = params.layout();
  const GruGateGrads<S> g = gru_gate_grads(cache, dh_next);

  grads.matrix(layout.gru_weight_input).noalias() += g.input_pre * cache.x.transpose();
  grads.matrix(layout.gru_weight_hidden).noalias() += g.hidden_pre * cache.h.transpose();
  grads.vector(layout.gru_bias) += g.hidden_pre.rowwise().sum();

  if (dx != nullptr) *dx = params.matrix(layout.gru_weight_input).transpose() * g.input_pre;
  if (dh != nullptr) *dh = params.matrix(layout.gru_weight_hidden).transpose() * g.hidden_pre + g.dh_direct;
}

template <typename S>
Mat<S> mlp_forward(const ParamSet<S>& params, Head head, const Mat<S>& input, MlpCache<S>* cache) {
  const ParamLayout& layout = params.layout();
  const LinearSlot& l0 = layout.layer(head, 0);
  const LinearSlot& l1 = layout.layer(head, 1);
  const LinearSlot& l2 = layout.layer(head, 2);

  Mat<S> a0 = params.matrix(l0.weight) * input;
  a0.colwise() += params.vector(l0.bias);
  a0 = a0.array().tanh().matrix();
  Mat<S> a1 = params.matrix(l1.weight) * a0;
  a1.colwise() += params.vector(l1.bias);
  a1 = a1.array().tanh().matrix();
  Mat<S> out = params.matrix(l2.weight) * a1;
  out.colwise() += params.vector(l2.bias);

  if (cache != nullptr) {
    cache->a0 = std::move(a0);
    cache->a1 = std::move(a1);
  }
  return out;
}

template <typename S>
Mat<S> mlp_backward(const ParamSet<S>& params, Head head, const Mat<S>& input, const MlpCache<S>& cache,
                    const Mat<S>& dout, ParamSet<S>& grads) {
  const ParamLayout& layout = params.layout();
  const LinearSlot& l0 = layout.layer(head, 0);
  const LinearSlot& l1 = layout.layer(head, 1);
  const LinearSlot& l2 = layout.layer(head, 2);

  grads.matrix(l2.weight).noalias() += dout * cache.a1.transpose();
  grads.vector(l2.bias) += dout.rowwise().sum();
  Mat<S> d1 = params.matrix(l2.weight).transpose() * dout;
  d1.array() *= S(1) - cache.a1.array().square();

  grads.matrix(l1.weight).noalias() += d1 * cache.a0.transpose();
  grads.vector(l1.bias) += d1.rowwise().sum();
  Mat<S> d0 = params.matrix(l1.weight).transpose() * d1;
  d0.array() *= S(1) - cache.a0.array().square();

  grads.matrix(l0.weight).noalias() += d0 * input.transpose();
  grads.vector(l0.bias) += d0.rowwise().sum();
  return params.matrix(l0.weight).transpose() * d0;
}

#define PREDPREY_INSTANTIATE_LAYERS(S)                                                              \
  template Mat<S> gru_forward(const ParamSet<S>&, const Mat<S>&, const Mat<S>&, GruCache<S>*);    \
  template GruGateGrads<S> gru_gate_grads(const GruCache<S>&, const Mat<S>&);                    \
  template void gru_backward(const ParamSet<S>&, const GruCache<S>&, const Mat<S>&, ParamSet<S>&, \
                             Mat<S>*, Mat<S>*);                                                   \
  template Mat<S> mlp_forward(const ParamSet<S>&, Head, const Mat<S>&, MlpCache<S>*);             \
  template Mat<S> mlp_backward(const ParamSet<S>&, Head, const Mat<S>&, const MlpCache<S>&,       \
                               const Mat<S>&, ParamSet<S>&);

PREDPREY_INSTANTIATE_LAYERS(float)
PREDPREY_INSTANTIATE_LAYERS(double)

}  // namespace predprey::nn

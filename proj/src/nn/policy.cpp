#include "predprey/nn/policy.hpp"

#include <stdexcept>
#include <string>

namespace predprey::nn {

template <typename S>
Mat<S> gru_input(const ParamSet<S>& params, const Mat<S>& observations, std::span<const int> prev_actions) {
  const NetConfig& cfg = params.config();
  if (observations.rows() != cfg.obs_dim)
    throw std::invalid_argument("observation width " + std::to_string(observations.rows()) +
                                " does not match obs_dim " + std::to_string(cfg.obs_dim));
  if (static_cast<Eigen::Index>(prev_actions.size()) != observations.cols())
    throw std::invalid_argument("prev_actions size does not match batch");

  const auto embedding = params.matrix(params.layout().embedding);
  Mat<S> x(cfg.gru_input_dim(), observations.cols());
  x.topRows(cfg.obs_dim) = observations;
  for (Eigen::Index j = 0; j < observations.cols(); ++j) {
    const int a = prev_actions[static_cast<std::size_t>(j)];
    if (a < 0 || a > cfg.no_action_index()) throw std::out_of_range("previous action index out of range");
    x.col(j).bottomRows(cfg.embed_dim) = embedding.row(a).transpose();
  }
  return x;
}

template <typename S>
PolicyOutput<S> forward(const ParamSet<S>& params, const Mat<S>& observations,
                        std::span<const int> prev_actions, const Mat<S>& hidden) {
  PolicyOutput<S> out;
  out.hidden = gru_forward<S>(params, gru_input(params, observations, prev_actions), hidden, nullptr);
  out.action_logits = mlp_forward<S>(params, Head::Actor, out.hidden, nullptr);
  out.values = mlp_forward<S>(params, Head::Critic, out.hidden, nullptr);
  out.location_logits = mlp_forward<S>(params, Head::Locator, out.hidden, nullptr);
  return out;
}

namespace {

template <typename S>
void check_sequence(const ParamSet<S>& params, const SequenceInput<S>& in) {
  const Eigen::Index cols = static_cast<Eigen::Index>(in.steps) * in.batch;
  if (in.steps <= 0 || in.batch <= 0) throw std::invalid_argument("sequence must be non-empty");
  if (in.observations.cols() != cols || static_cast<Eigen::Index>(in.prev_actions.size()) != cols)
    throw std::invalid_argument("sequence observations/actions do not match steps*batch");
  if (in.masks.rows() != in.steps || in.masks.cols() != in.batch)
    throw std::invalid_argument("sequence masks must be steps x batch");
  if (in.initial_hidden.rows() != params.config().hidden_width || in.initial_hidden.cols() != in.batch)
    throw std::invalid_argument("initial hidden state has wrong shape");
}

}  // namespace

template <typename S>
SequenceOutput<S> forward_sequence(const ParamSet<S>& params, const SequenceInput<S>& in) {
  check_sequence(params, in);
  const Eigen::Index n = in.batch;
  const Mat<S> x_all = gru_input(params, in.observations, in.prev_actions);

  SequenceOutput<S> out;
  SequenceTape<S>& tape = out.tape;
  tape.gru.resize(static_cast<std::size_t>(in.steps));
  tape.hidden.resize(params.config().hidden_width, x_all.cols());

  Mat<S> h = in.initial_hidden;
  for (int t = 0; t < in.steps; ++t) {
    Mat<S> h_in = h * in.masks.row(t).asDiagonal();
    h = gru_forward<S>(params, x_all.middleCols(t * n, n), h_in, &tape.gru[static_cast<std::size_t>(t)]);
    tape.hidden.middleCols(t * n, n) = h;
  }

  out.action_logits = mlp_forward<S>(params, Head::Actor, tape.hidden, &tape.heads[0]);
  out.values = mlp_forward<S>(params, Head::Critic, tape.hidden, &tape.heads[1]);
  out.location_logits = mlp_forward<S>(params, Head::Locator, tape.hidden, &tape.heads[2]);
  return out;
}

template <typename S>
void backward_sequence(const ParamSet<S>& params, const SequenceInput<S>& in, const SequenceOutput<S>& output,
                       const OutputGrads<S>& dout, ParamSet<S>& grads) {
  check_sequence(params, in);
  if (grads.layout_ptr() != params.layout_ptr() && !(grads.config() == params.config()))
    throw std::invalid_argument("gradient buffer layout does not match parameters");

  const ParamLayout& layout = params.layout();
  const SequenceTape<S>& tape = output.tape;
  const Eigen::Index n = in.batch;
  const Eigen::Index width = layout.config.hidden_width;

  Mat<S> dhidden = mlp_backward<S>(params, Head::Actor, tape.hidden, tape.heads[0], dout.action_logits, grads);
  dhidden += mlp_backward<S>(params, Head::Critic, tape.hidden, tape.heads[1], dout.values, grads);
  dhidden += mlp_backward<S>(params, Head::Locator, tape.hidden, tape.heads[2], dout.location_logits, grads);

  Mat<S> input_pre(3 * width, dhidden.cols());
  Mat<S> hidden_pre(3 * width, dhidden.cols());
  Mat<S> h_in_all(width, dhidden.cols());
  const auto w_hidden = params.matrix(layout.gru_weight_hidden);

  Mat<S> carry = Mat<S>::Zero(width, n);
  for (int t = in.steps - 1; t >= 0; --t) {
    const GruCache<S>& cache = tape.gru[static_cast<std::size_t>(t)];
    const Mat<S> dh = dhidden.middleCols(t * n, n) + carry;
    GruGateGrads<S> g = gru_gate_grads(cache, dh);
    input_pre.middleCols(t * n, n) = g.input_pre;
    hidden_pre.middleCols(t * n, n) = g.hidden_pre;
    h_in_all.middleCols(t * n, n) = cache.h;
    carry = (w_hidden.transpose() * g.hidden_pre + g.dh_direct) * in.masks.row(t).asDiagonal();
  }

  Mat<S> x_all(layout.config.gru_input_dim(), dhidden.cols());
  for (int t = 0; t < in.steps; ++t) x_all.middleCols(t * n, n) = tape.gru[static_cast<std::size_t>(t)].x;

  grads.matrix(layout.gru_weight_input).noalias() += input_pre * x_all.transpose();
  grads.matrix(layout.gru_weight_hidden).noalias() += hidden_pre * h_in_all.transpose();
  grads.vector(layout.gru_bias) += hidden_pre.rowwise().sum();

  const Mat<S> dx_embed = params.matrix(layout.gru_weight_input).rightCols(layout.config.embed_dim).transpose() *
                          input_pre;
  auto dembedding = grads.matrix(layout.embedding);
  for (Eigen::Index j = 0; j < dx_embed.cols(); ++j) {
    dembedding.row(in.prev_actions[static_cast<std::size_t>(j)]) += dx_embed.col(j).transpose();
  }
}

#define PREDPREY_INSTANTIATE_POLICY(S)                                                                  \
  template Mat<S> gru_input(const ParamSet<S>&, const Mat<S>&, std::span<const int>);                  \
  template PolicyOutput<S> forward(const ParamSet<S>&, const Mat<S>&, std::span<const int>, const Mat<S>&); \
  template SequenceOutput<S> forward_sequence(const ParamSet<S>&, const SequenceInput<S>&);            \
  template void backward_sequence(const ParamSet<S>&, const SequenceInput<S>&, const SequenceOutput<S>&, \
                                  const OutputGrads<S>&, ParamSet<S>&);

PREDPREY_INSTANTIATE_POLICY(float)
PREDPREY_INSTANTIATE_POLICY(double)

}  // namespace predprey::nn

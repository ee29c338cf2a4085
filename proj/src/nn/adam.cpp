#include "predprey/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace predprey::nn {

AdamState AdamState::zeros(Eigen::Index size) {
  AdamState s;
  s.first_moment = Vec<float>::Zero(size);
  s.second_moment = Vec<float>::Zero(size);
  return s;
}

void adam_step(ParamSet<float>& params, const ParamSet<float>& grads, AdamState& state, double lr,
               const AdamOptions& options) {
  const Eigen::Index size = params.flat().size();
  if (grads.flat().size() != size || state.first_moment.size() != size || state.second_moment.size() != size)
    throw std::invalid_argument("adam_step: parameter, gradient and moment sizes differ");
  if (lr < 0.0) throw std::invalid_argument("adam_step: learning rate must be non-negative");

  state.step += 1;
  const auto b1 = static_cast<float>(options.beta1);
  const auto b2 = static_cast<float>(options.beta2);
  // Complements taken in double: 1 - 0.999f is off by 1e-5 relative.
  const auto one_minus_b1 = static_cast<float>(1.0 - options.beta1);
  const auto one_minus_b2 = static_cast<float>(1.0 - options.beta2);
  const double correction1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.step));
  const auto step_size = static_cast<float>(lr / correction1);
  const auto sqrt_c2 = static_cast<float>(std::sqrt(correction2));
  const auto eps = static_cast<float>(options.eps);

  const auto g = grads.flat().array();
  auto m = state.first_moment.array();
  auto v = state.second_moment.array();
  m = b1 * m + one_minus_b1 * g;
  v = b2 * v + one_minus_b2 * g * g;
  params.flat().array() -= step_size * m / (v.sqrt() / sqrt_c2 + eps);
}

template <typename S>
S global_norm(const ParamSet<S>& grads) {
  return grads.flat().norm();
}

template <typename S>
S clip_grad_norm(ParamSet<S>& grads, S max_norm) {
  const S norm = global_norm(grads);
  if (norm > max_norm) grads.flat() *= max_norm / norm;
  return norm;
}

template float global_norm(const ParamSet<float>&);
template double global_norm(const ParamSet<double>&);
template float clip_grad_norm(ParamSet<float>&, float);
template double clip_grad_norm(ParamSet<double>&, double);

}  // namespace predprey::nn

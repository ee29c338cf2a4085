#include "predprey/nn/categorical.hpp"

#include <stdexcept>

namespace predprey::nn {

template <typename S>
Categorical<S>::Categorical(const Eigen::Ref<const Vec<S>>& logits) {
  if (logits.size() == 0) throw std::invalid_argument("categorical needs at least one logit");
  if (!logits.allFinite()) throw std::invalid_argument("categorical logits must be finite");
  const S max = logits.maxCoeff();
  const Vec<S> shifted = logits.array() - max;
  const S log_norm = std::log(shifted.array().exp().sum());
  log_probs_ = shifted.array() - log_norm;
  probs_ = log_probs_.array().exp();
}

template <typename S>
S Categorical<S>::log_prob(int action) const {
  if (action < 0 || action >= probs_.size()) throw std::out_of_range("action outside distribution support");
  return log_probs_(action);
}

template <typename S>
S Categorical<S>::entropy() const {
  S h = 0;
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    if (probs_(i) > S(0)) h -= probs_(i) * log_probs_(i);
  }
  return h;
}

template <typename S>
int Categorical<S>::sample_from_uniform(double u) const {
  double cumulative = 0.0;
  int last_supported = 0;
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    if (probs_(i) <= S(0)) continue;
    last_supported = static_cast<int>(i);
    cumulative += static_cast<double>(probs_(i));
    if (u < cumulative) return static_cast<int>(i);
  }
  // Rounding left the total just under 1.
  return last_supported;
}

template <typename S>
int Categorical<S>::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return sample_from_uniform(unit(rng));
}

template <typename S>
int Categorical<S>::mode() const {
  Eigen::Index best = 0;
  probs_.maxCoeff(&best);
  return static_cast<int>(best);
}

template class Categorical<float>;
template class Categorical<double>;

}  // namespace predprey::nn

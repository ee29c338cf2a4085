#pragma once

#include <random>

#include "predprey/nn/params.hpp"

namespace predprey::nn {

// Discrete distribution over softmax(logits).
template <typename S>
class Categorical {
 public:
  explicit Categorical(const Eigen::Ref<const Vec<S>>& logits);

  const Vec<S>& probs() const { return probs_; }
  const Vec<S>& log_probs() const { return log_probs_; }

  S log_prob(int action) const;
  S entropy() const;

  // Inverse-CDF draw from a uniform variate in [0, 1).
  int sample_from_uniform(double u) const;
  int sample(std::mt19937_64& rng) const;
  int mode() const;

 private:
  Vec<S> probs_;
  Vec<S> log_probs_;
};

extern template class Categorical<float>;
extern template class Categorical<double>;

}  // namespace predprey::nn

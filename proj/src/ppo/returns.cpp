#include "predprey/ppo/returns.hpp"

#include <cmath>
#include <stdexcept>

namespace predprey::ppo {

nn::RowMat<float> compute_returns(const nn::RowMat<float>& rewards, const nn::RowMat<float>& masks,
                                  const nn::RowMat<float>& values, double gamma) {
  const Eigen::Index steps = rewards.rows();
  if (masks.rows() != steps + 1 || values.rows() != steps + 1 || masks.cols() != rewards.cols() ||
      values.cols() != rewards.cols())
    throw std::invalid_argument("compute_returns: rewards [T,N] needs masks and values of shape [T+1,N]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("compute_returns: gamma must lie in [0, 1]");

  // Accumulated in double so each return is rounded to float only once.
  nn::RowMat<double> returns(steps, rewards.cols());
  Eigen::Matrix<double, 1, Eigen::Dynamic> next = values.row(steps).cast<double>();
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    returns.row(t) = rewards.row(t).cast<double>() + gamma * masks.row(t + 1).cast<double>().cwiseProduct(next);
    next = returns.row(t);
  }
  return returns.cast<float>();
}

nn::RowMat<float> compute_advantages(const nn::RowMat<float>& returns, const nn::RowMat<float>& values,
                                     bool normalize) {
  nn::RowMat<float> adv = returns - values.topRows(returns.rows());
  if (!normalize || adv.size() < 2) return adv;
  const double mean = adv.cast<double>().mean();
  const double var = (adv.cast<double>().array() - mean).square().mean();
  const double scale = 1.0 / (std::sqrt(var) + 1e-8);
  adv = ((adv.cast<double>().array() - mean) * scale).cast<float>().matrix();
  return adv;
}

}  // namespace predprey::ppo

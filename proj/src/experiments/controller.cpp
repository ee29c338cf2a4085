#include "predprey/experiments/controller.hpp"

#include <cmath>

#include "predprey/nn/categorical.hpp"
#include "predprey/nn/policy.hpp"

namespace predprey::experiments {

PolicyController::PolicyController(nn::ParamSet<float> params, PolicyMode mode, arena::Rng rng)
    : params_(std::move(params)), mode_(mode), rng_(rng) {
  const nn::NetConfig& cfg = params_.config();
  hidden_ = nn::Mat<float>::Zero(cfg.hidden_width, 1);
  obs_ = nn::Mat<float>::Zero(cfg.obs_dim, 1);
  prev_action_ = cfg.no_action_index();
}

void PolicyController::begin_episode() {
  hidden_.setZero();
  prev_action_ = params_.config().no_action_index();
}

arena::Action PolicyController::act(const arena::Observation& obs) {
  obs.write_to(std::span<float>(obs_.data(), static_cast<std::size_t>(obs_.rows())));
  const int prev[1] = {prev_action_};
  nn::PolicyOutput<float> out = nn::forward(params_, obs_, std::span<const int>(prev, 1), hidden_);
  hidden_ = std::move(out.hidden);
  const nn::Categorical<float> dist(out.action_logits.col(0));
  const int a = (mode_ == PolicyMode::Greedy) ? dist.mode() : dist.sample(rng_);
  prev_action_ = a;
  return arena::action_from_index(a);
}

arena::Action pursue(const arena::Observation& obs, double tolerance) {
  if (!obs.adversary_visible) return arena::Action::Forward;
  const double theta = obs.adversary.relative_angle;
  if (theta > tolerance) return arena::Action::ForwardLeft;
  if (theta < -tolerance) return arena::Action::ForwardRight;
  return arena::Action::Forward;
}

arena::Action flee(const arena::Observation& obs) {
  if (!obs.adversary_visible) return arena::Action::Forward;
  const double theta = obs.adversary.relative_angle;
  if (std::abs(theta) > 2.5) return arena::Action::Forward;
  return theta > 0.0 ? arena::Action::ForwardRight : arena::Action::ForwardLeft;
}

}  // namespace predprey::experiments

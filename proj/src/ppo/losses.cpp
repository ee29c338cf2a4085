#include "predprey/ppo/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "predprey/nn/categorical.hpp"

namespace predprey::ppo {

template <typename S>
LossEvaluation<S> ppo_losses(const nn::ParamSet<S>& params, const PpoBatch<S>& batch, const PPOConfig& config) {
  const Eigen::Index samples = static_cast<Eigen::Index>(batch.sequence.steps) * batch.sequence.batch;
  if (static_cast<Eigen::Index>(batch.actions.size()) != samples ||
      static_cast<Eigen::Index>(batch.location_labels.size()) != samples || batch.old_log_probs.size() != samples ||
      batch.advantages.size() != samples || batch.returns.size() != samples)
    throw std::invalid_argument("ppo_losses: batch arrays do not match steps*batch");

  LossEvaluation<S> eval;
  eval.output = nn::forward_sequence(params, batch.sequence);
  const nn::SequenceOutput<S>& out = eval.output;
  if (!out.action_logits.allFinite() || !out.values.allFinite() || !out.location_logits.allFinite())
    throw TrainingDiverged("non-finite network output during replay");

  nn::OutputGrads<S>& g = eval.output_grads;
  g.action_logits = nn::Mat<S>::Zero(out.action_logits.rows(), samples);
  g.values = nn::Mat<S>::Zero(1, samples);
  g.location_logits = nn::Mat<S>::Zero(out.location_logits.rows(), samples);

  const S inv_m = S(1) / static_cast<S>(samples);
  const S eps = static_cast<S>(config.clip_eps);
  const S value_coef = static_cast<S>(config.value_coef);
  const S entropy_coef = static_cast<S>(config.entropy_coef);
  const S location_coef = static_cast<S>(config.location_coef);

  S action_sum = 0, value_sum = 0, entropy_sum = 0, location_sum = 0;
  long clipped = 0;
  for (Eigen::Index i = 0; i < samples; ++i) {
    const nn::Categorical<S> policy(out.action_logits.col(i));
    const int a = batch.actions[static_cast<std::size_t>(i)];
    const S adv = batch.advantages(i);
    const S ratio = std::exp(policy.log_prob(a) - batch.old_log_probs(i));
    const S surr_unclipped = ratio * adv;
    const S surr_clipped = std::clamp(ratio, S(1) - eps, S(1) + eps) * adv;
    action_sum -= std::min(surr_unclipped, surr_clipped);

    const bool in_range = ratio >= S(1) - eps && ratio <= S(1) + eps;
    if (!in_range) ++clipped;
    // The min follows the unclipped branch unless the clamp is active and smaller.
    if (surr_unclipped <= surr_clipped || in_range) {
      const S dlogp = -adv * ratio * inv_m;
      auto col = g.action_logits.col(i);
      col = -dlogp * policy.probs();
      col(a) += dlogp;
    }

    const S h = policy.entropy();
    entropy_sum += h;
    // d(-c * H)/dz_j = c * p_j * (log p_j + H)
    g.action_logits.col(i).array() +=
        entropy_coef * inv_m * policy.probs().array() * (policy.log_probs().array() + h);

    const S err = out.values(0, i) - batch.returns(i);
    value_sum += err * err;
    g.values(0, i) = value_coef * S(2) * err * inv_m;

    const nn::Categorical<S> locator(out.location_logits.col(i));
    const int label = batch.location_labels[static_cast<std::size_t>(i)];
    location_sum -= locator.log_prob(label);
    g.location_logits.col(i) = location_coef * inv_m * locator.probs();
    g.location_logits(label, i) -= location_coef * inv_m;
  }

  LossBreakdown<S>& l = eval.losses;
  l.action = action_sum * inv_m;
  l.value = value_sum * inv_m;
  l.entropy = entropy_sum * inv_m;
  l.location = location_sum * inv_m;
  l.total = l.action + value_coef * l.value - entropy_coef * l.entropy + location_coef * l.location;
  l.clip_fraction = static_cast<double>(clipped) / static_cast<double>(samples);
  if (!std::isfinite(static_cast<double>(l.total)))
    throw TrainingDiverged("non-finite PPO loss (total=" + std::to_string(static_cast<double>(l.total)) + ")");
  return eval;
}

template <typename S>
LossBreakdown<S> ppo_gradient(const nn::ParamSet<S>& params, const PpoBatch<S>& batch, const PPOConfig& config,
                              nn::ParamSet<S>& grads) {
  LossEvaluation<S> eval = ppo_losses(params, batch, config);
  grads.set_zero();
  nn::backward_sequence(params, batch.sequence, eval.output, eval.output_grads, grads);
  if (!grads.all_finite()) throw TrainingDiverged("non-finite gradient");
  return eval.losses;
}

template LossEvaluation<float> ppo_losses(const nn::ParamSet<float>&, const PpoBatch<float>&, const PPOConfig&);
template LossEvaluation<double> ppo_losses(const nn::ParamSet<double>&, const PpoBatch<double>&, const PPOConfig&);
template LossBreakdown<float> ppo_gradient(const nn::ParamSet<float>&, const PpoBatch<float>&, const PPOConfig&,
                                           nn::ParamSet<float>&);
template LossBreakdown<double> ppo_gradient(const nn::ParamSet<double>&, const PpoBatch<double>&, const PPOConfig&,
                                            nn::ParamSet<double>&);

}  // namespace predprey::ppo

#pragma once

// Central finite-difference check of the full policy + PPO objective on a
// small random problem, in double precision.

#include <algorithm>
#include <cmath>
#include <random>

#include "predprey/nn/params.hpp"
#include "predprey/nn/policy.hpp"
#include "predprey/ppo/losses.hpp"

namespace gradcheck {

struct Problem {
  predprey::nn::ParamSet<double> params;
  predprey::ppo::PpoBatch<double> batch;
  predprey::ppo::PPOConfig config;
};

struct Report {
  double max_relative_error = 0.0;
  long checked = 0;
};

// Width-8 network with random weights, a T=5 window over `batch` sequences
// and one episode boundary (mask 0 entering step 3 of sequence 0).
inline Problem make_problem(unsigned seed, int batch = 2, int steps = 5) {
  using namespace predprey;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  nn::NetConfig cfg;
  cfg.hidden_width = 8;
  cfg.embed_dim = 4;
  Problem p;
  p.params = nn::ParamSet<double>(nn::ParamLayout::build(cfg));
  for (Eigen::Index i = 0; i < p.params.flat().size(); ++i) p.params.flat()(i) = 0.5 * normal(rng);

  const int samples = steps * batch;
  auto& seq = p.batch.sequence;
  seq.steps = steps;
  seq.batch = batch;
  seq.observations = nn::Mat<double>(cfg.obs_dim, samples);
  for (Eigen::Index i = 0; i < seq.observations.size(); ++i) seq.observations.data()[i] = normal(rng);
  std::uniform_int_distribution<int> action(0, cfg.action_count - 1);
  std::uniform_int_distribution<int> prev(0, cfg.action_count);
  std::uniform_int_distribution<int> label(0, cfg.locator_out - 1);
  for (int i = 0; i < samples; ++i) {
    seq.prev_actions.push_back(prev(rng));
    p.batch.actions.push_back(action(rng));
    p.batch.location_labels.push_back(label(rng));
  }
  seq.masks = nn::Mat<double>::Ones(steps, batch);
  seq.masks(std::min(3, steps - 1), 0) = 0.0;
  seq.initial_hidden = nn::Mat<double>(cfg.hidden_width, batch);
  for (Eigen::Index i = 0; i < seq.initial_hidden.size(); ++i) seq.initial_hidden.data()[i] = 0.5 * normal(rng);

  // Old log-probs place every ratio well inside or well outside the clip
  // range, away from the kinks of the surrogate's min/clamp.
  const nn::SequenceOutput<double> out = nn::forward_sequence(p.params, seq);
  p.batch.old_log_probs.resize(samples);
  p.batch.advantages.resize(samples);
  p.batch.returns.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const auto& logits = out.action_logits.col(i);
    const double lse = std::log((logits.array() - logits.maxCoeff()).exp().sum()) + logits.maxCoeff();
    const double logp = logits(p.batch.actions[static_cast<std::size_t>(i)]) - lse;
    const double choices[] = {0.0, 0.1, -0.1, 0.6, -0.6};
    const double shift = choices[static_cast<std::size_t>(i) % 5];
    p.batch.old_log_probs(i) = logp - shift;
    p.batch.advantages(i) = normal(rng);
    p.batch.returns(i) = normal(rng);
  }
  return p;
}

inline Report check(const Problem& p, double step = 1e-4) {
  using namespace predprey;
  nn::ParamSet<double> grads(p.params.layout_ptr());
  ppo::ppo_gradient(p.params, p.batch, p.config, grads);

  Report report;
  nn::ParamSet<double> probe = p.params;
  for (Eigen::Index i = 0; i < probe.flat().size(); ++i) {
    const double original = probe.flat()(i);
    probe.flat()(i) = original + step;
    const double up = ppo::ppo_losses(probe, p.batch, p.config).losses.total;
    probe.flat()(i) = original - step;
    const double down = ppo::ppo_losses(probe, p.batch, p.config).losses.total;
    probe.flat()(i) = original;
    const double numeric = (up - down) / (2.0 * step);
    const double analytic = grads.flat()(i);
    const double scale = std::max({std::fabs(numeric), std::fabs(analytic), 1e-6});
    report.max_relative_error = std::max(report.max_relative_error, std::fabs(numeric - analytic) / scale);
    ++report.checked;
  }
  return report;
}

}  // namespace gradcheck

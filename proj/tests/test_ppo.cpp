#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "predprey/nn/adam.hpp"
#include "predprey/nn/categorical.hpp"
#include "predprey/nn/checkpoint.hpp"
#include "predprey/ppo/returns.hpp"
#include "predprey/ppo/trainer.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace predprey;
using namespace predprey::ppo;
namespace fs = std::filesystem;

namespace {

TrainerSetup tiny_setup(std::uint64_t seed = 1) {
  TrainerSetup s;
  s.net.hidden_width = 16;
  s.net.embed_dim = 4;
  s.ppo.rollout_len = 10;
  s.ppo.n_envs = 3;
  s.ppo.total_updates = 10;
  s.ppo.log_interval = 5;
  s.predator = {{0.6, arena::VisionArea::of(1.0)}, 0.93};
  s.prey = {{0.5, arena::VisionArea::unbounded()}, 0.99};
  s.seed = seed;
  return s;
}

struct RandomWindow {
  nn::RowMat<float> rewards, masks, values;
  std::vector<double> r, m, v;
};

RandomWindow random_window(std::mt19937_64& rng, int steps, int envs) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::bernoulli_distribution ends(0.08);
  RandomWindow w;
  w.rewards.resize(steps, envs);
  w.masks.resize(steps + 1, envs);
  w.values.resize(steps + 1, envs);
  for (int t = 0; t <= steps; ++t) {
    for (int n = 0; n < envs; ++n) {
      if (t < steps) w.rewards(t, n) = static_cast<float>(u(rng));
      w.masks(t, n) = ends(rng) ? 0.0f : 1.0f;
      w.values(t, n) = static_cast<float>(u(rng));
    }
  }
  auto copy = [](const nn::RowMat<float>& m) {
    return std::vector<double>(m.data(), m.data() + m.size());
  };
  w.r = copy(w.rewards);
  w.m = copy(w.masks);
  w.v = copy(w.values);
  return w;
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "predprey_test_ppo" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Returns, MatchBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomWindow w = random_window(rng, 50, 4);
    for (double gamma : {0.90, 0.93, 0.99}) {
      const nn::RowMat<float> got = compute_returns(w.rewards, w.masks, w.values, gamma);
      const std::vector<double> want = oracle::brute_force_returns(w.r, w.m, w.v, 50, 4, gamma);
      for (std::size_t i = 0; i < want.size(); ++i) ASSERT_NEAR(got.data()[i], want[i], 1e-5 * std::max(1.0, std::fabs(want[i])));
    }
  }
}

TEST(Returns, DiscountConstants) {
  // A bootstrap value of 1 fifty steps ahead, no rewards in between.
  nn::RowMat<float> rewards = nn::RowMat<float>::Zero(50, 1);
  nn::RowMat<float> masks = nn::RowMat<float>::Ones(51, 1);
  nn::RowMat<float> values = nn::RowMat<float>::Zero(51, 1);
  values(50, 0) = 1.0f;
  EXPECT_NEAR(compute_returns(rewards, masks, values, 0.99)(0, 0), 0.60500, 1e-5);
  EXPECT_NEAR(compute_returns(rewards, masks, values, 0.93)(0, 0), 0.02656, 1e-5);
  EXPECT_NEAR(std::pow(0.99, 50), 0.60500, 1e-5);
  EXPECT_NEAR(std::pow(0.93, 50), 0.02656, 1e-5);
}

TEST(Returns, MaskIsolatesEpisodes) {
  std::mt19937_64 rng(3);
  RandomWindow w = random_window(rng, 20, 2);
  w.masks.setOnes();
  w.masks(8, 0) = 0.0f;  // step 7 ended an episode
  const nn::RowMat<float> before = compute_returns(w.rewards, w.masks, w.values, 0.99);
  for (int t = 8; t < 20; ++t) w.rewards(t, 0) = 0.0f;
  w.values(20, 0) = 123.0f;
  const nn::RowMat<float> after = compute_returns(w.rewards, w.masks, w.values, 0.99);
  for (int t = 0; t < 8; ++t) EXPECT_EQ(before(t, 0), after(t, 0));
  EXPECT_NEAR(after(7, 0), w.rewards(7, 0), 1e-6);
}

TEST(Advantages, NormalizedMoments) {
  std::mt19937_64 rng(4);
  const RandomWindow w = random_window(rng, 50, 8);
  const nn::RowMat<float> ret = compute_returns(w.rewards, w.masks, w.values, 0.99);
  const nn::RowMat<float> adv = compute_advantages(ret, w.values, true);
  double mean = 0.0, sq = 0.0;
  for (Eigen::Index i = 0; i < adv.size(); ++i) mean += adv.data()[i];
  mean /= static_cast<double>(adv.size());
  for (Eigen::Index i = 0; i < adv.size(); ++i) sq += (adv.data()[i] - mean) * (adv.data()[i] - mean);
  EXPECT_LT(std::fabs(mean), 1e-6);
  EXPECT_NEAR(sq / static_cast<double>(adv.size()), 1.0, 1e-4);

  const nn::RowMat<float> raw = compute_advantages(ret, w.values, false);
  EXPECT_EQ(raw(3, 2), ret(3, 2) - w.values(3, 2));
}

TEST(Schedule, LinearDecay) {
  EXPECT_DOUBLE_EQ(linear_lr(0, 10000, 7e-4), 7e-4);
  EXPECT_DOUBLE_EQ(linear_lr(5000, 10000, 7e-4), 3.5e-4);
  EXPECT_EQ(linear_lr(10000, 10000, 7e-4), 0.0);
  for (long k = 0; k + 2 <= 1000; k += 37) {
    const double a = linear_lr(k, 1000, 7e-4), b = linear_lr(k + 1, 1000, 7e-4), c = linear_lr(k + 2, 1000, 7e-4);
    EXPECT_NEAR(b - a, c - b, 1e-18);
  }
}

TEST(Config, RejectsDisabledVariants) {
  PPOConfig c;
  EXPECT_NO_THROW(c.validate());
  c.use_gae = true;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.clip_value_loss = true;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.epochs = 4;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.minibatches = 2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Losses, ClipInactiveAtOldPolicy) {
  gradcheck::Problem p = gradcheck::make_problem(11, 3);
  const nn::SequenceOutput<double> out = nn::forward_sequence(p.params, p.batch.sequence);
  for (Eigen::Index i = 0; i < p.batch.old_log_probs.size(); ++i) {
    const nn::Categorical<double> c(out.action_logits.col(i));
    p.batch.old_log_probs(i) = c.log_prob(p.batch.actions[static_cast<std::size_t>(i)]);
  }
  const LossEvaluation<double> eval = ppo_losses(p.params, p.batch, p.config);
  EXPECT_EQ(eval.losses.clip_fraction, 0.0);
  // With rho = 1 both surrogates coincide, so the action loss is -mean(A).
  EXPECT_NEAR(eval.losses.action, -p.batch.advantages.mean(), 1e-12);
}

TEST(Losses, ClippedBranchHasNoActionGradient) {
  gradcheck::Problem p = gradcheck::make_problem(12, 1);
  p.config.entropy_coef = 0.0;
  const nn::SequenceOutput<double> out = nn::forward_sequence(p.params, p.batch.sequence);
  // Sample 0: A > 0 and rho = 2. Sample 1: A < 0 and rho = 2 (unclipped is
  // the min there, so gradient flows).
  for (int i = 0; i < 2; ++i) {
    const nn::Categorical<double> c(out.action_logits.col(i));
    p.batch.old_log_probs(i) = c.log_prob(p.batch.actions[static_cast<std::size_t>(i)]) - std::log(2.0);
  }
  p.batch.advantages(0) = 1.5;
  p.batch.advantages(1) = -1.5;
  const LossEvaluation<double> eval = ppo_losses(p.params, p.batch, p.config);
  EXPECT_TRUE(eval.output_grads.action_logits.col(0).isZero(0.0));
  EXPECT_GT(eval.output_grads.action_logits.col(1).norm(), 0.0);
}

TEST(Losses, PerfectLocatorDrivesLocationLossToZero) {
  gradcheck::Problem p = gradcheck::make_problem(13, 2);
  const nn::ParamLayout& l = p.params.layout();
  const nn::LinearSlot out = l.layer(nn::Head::Locator, 2);
  p.params.matrix(out.weight).setZero();
  p.params.vector(out.bias).setZero();
  p.params.vector(out.bias)(7) = 1000.0;
  for (int& label : p.batch.location_labels) label = 7;
  EXPECT_NEAR(ppo_losses(p.params, p.batch, p.config).losses.location, 0.0, 1e-12);
}

TEST(Losses, TotalCombinesTerms) {
  const gradcheck::Problem p = gradcheck::make_problem(14, 2);
  const LossBreakdown<double> l = ppo_losses(p.params, p.batch, p.config).losses;
  EXPECT_NEAR(l.total, l.action + 0.5 * l.value - 0.01 * l.entropy + 1.0 * l.location, 1e-12);
}

TEST(Losses, NonFiniteOutputAborts) {
  gradcheck::Problem p = gradcheck::make_problem(15, 2);
  p.params.flat()(p.params.flat().size() - 1) = NAN;
  nn::ParamSet<double> grads(p.params.layout_ptr());
  EXPECT_THROW(ppo_gradient(p.params, p.batch, p.config, grads), TrainingDiverged);
}

TEST(Trainer, RolloutBookkeeping) {
  Trainer trainer(tiny_setup());
  const RolloutPair r = trainer.collect_rollout();
  EXPECT_EQ(r.predator.samples(), 30);
  for (int n = 0; n < 3; ++n) {
    EXPECT_EQ(r.predator.masks(0, n), 0.0f);
    EXPECT_EQ(r.predator.prev_actions[r.predator.index(0, n)], 4);
  }
  for (int t = 0; t < 10; ++t) {
    for (int n = 0; n < 3; ++n) {
      const std::size_t i = r.predator.index(t, n);
      EXPECT_GE(r.predator.location_labels[i], 0);
      EXPECT_LT(r.predator.location_labels[i], 144);
      if (t > 0 && r.predator.masks(t, n) == 1.0f) {
        EXPECT_EQ(r.predator.prev_actions[i], r.predator.actions[r.predator.index(t - 1, n)]);
        EXPECT_EQ(r.prey.prev_actions[i], r.prey.actions[r.prey.index(t - 1, n)]);
      }
    }
  }
}

TEST(Trainer, LearningRateFollowsSchedule) {
  Trainer trainer(tiny_setup());
  for (long k = 0; k < 10; ++k) {
    const UpdateStats s = trainer.update(trainer.collect_rollout());
    EXPECT_DOUBLE_EQ(s.lr, 7e-4 * (1.0 - static_cast<double>(k) / 10.0));
  }
  EXPECT_THROW(trainer.update(trainer.collect_rollout()), std::logic_error);
}

TEST(Trainer, TenUpdatesBitIdentical) {
  auto run = [] {
    Trainer t(tiny_setup(5));
    t.run();
    return std::make_pair(t.params(arena::AgentKind::Predator).flat(), t.params(arena::AgentKind::Prey).flat());
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Trainer, SeedsChangeTheRun) {
  Trainer a(tiny_setup(1)), b(tiny_setup(2));
  EXPECT_NE(a.params(arena::AgentKind::Predator).flat(), b.params(arena::AgentKind::Predator).flat());
}

TEST(Trainer, AgentUpdatesAreIndependent) {
  Trainer trainer(tiny_setup(7));
  const RolloutPair r = trainer.collect_rollout();
  const nn::ParamSet<float> prey_first = trainer.agent_gradient(arena::AgentKind::Prey, r.prey);
  const nn::ParamSet<float> pred_second = trainer.agent_gradient(arena::AgentKind::Predator, r.predator);
  const nn::ParamSet<float> pred_first = trainer.agent_gradient(arena::AgentKind::Predator, r.predator);
  const nn::ParamSet<float> prey_second = trainer.agent_gradient(arena::AgentKind::Prey, r.prey);
  EXPECT_EQ(pred_first.flat(), pred_second.flat());
  EXPECT_EQ(prey_first.flat(), prey_second.flat());

  // update() applies exactly these clipped gradients with Adam.
  nn::ParamSet<float> pred = trainer.params(arena::AgentKind::Predator);
  nn::ParamSet<float> prey = trainer.params(arena::AgentKind::Prey);
  nn::AdamState pa = nn::AdamState::zeros(pred.flat().size()), qa = pa;
  nn::adam_step(pred, pred_first, pa, 7e-4);
  nn::adam_step(prey, prey_first, qa, 7e-4);
  trainer.update(r);
  EXPECT_EQ(trainer.params(arena::AgentKind::Predator).flat(), pred.flat());
  EXPECT_EQ(trainer.params(arena::AgentKind::Prey).flat(), prey.flat());
  EXPECT_LE(nn::global_norm(pred_first), 0.5f + 1e-6f);
}

TEST(TrainPair, ZeroUpdatesSavesInitialization) {
  TrainerSetup s = tiny_setup(3);
  s.ppo.total_updates = 0;
  const fs::path dir = temp_dir("k0");
  const TrainPairResult r = train_pair(s, dir);
  const Trainer fresh(s);
  EXPECT_EQ(nn::load_checkpoint(r.predator_checkpoint).params.flat(), fresh.params(arena::AgentKind::Predator).flat());
  EXPECT_EQ(nn::load_checkpoint(r.prey_checkpoint).params.flat(), fresh.params(arena::AgentKind::Prey).flat());
  EXPECT_TRUE(r.log.empty());
}

TEST(TrainPair, LogRowsAndMetadata) {
  TrainerSetup s = tiny_setup(4);
  s.ppo.total_updates = 12;
  s.ppo.log_interval = 4;
  const fs::path dir = temp_dir("log");
  const TrainPairResult r = train_pair(s, dir);
  ASSERT_EQ(r.log.size(), 3U);
  EXPECT_EQ(r.log[0].update, 4);
  EXPECT_EQ(r.log[2].env_steps, 12 * 10);
  std::ifstream in(r.log_path);
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 4);

  const nn::Checkpoint pred = nn::load_checkpoint(r.predator_checkpoint);
  EXPECT_EQ(pred.metadata.at("role"), "predator");
  EXPECT_EQ(pred.metadata.at("vision_area"), 1.0);
  EXPECT_EQ(pred.metadata.at("gamma"), 0.93);
  EXPECT_EQ(pred.metadata.at("updates"), 12);
  const nn::Checkpoint prey = nn::load_checkpoint(r.prey_checkpoint);
  EXPECT_TRUE(prey.metadata.at("vision_area").is_null());
  EXPECT_EQ(prey.metadata.at("opponent").at("vision_area"), 1.0);
}

TEST(TrainerSetupCheck, ObservationSizeMustMatchArena) {
  TrainerSetup s = tiny_setup();
  s.arena.n_obstacles = 2;
  EXPECT_THROW(Trainer{s}, std::invalid_argument);
  s.net.obs_dim = 10;
  EXPECT_NO_THROW(Trainer{s});
}

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "predprey/arena/arena.hpp"
#include "predprey/arena/trace.hpp"
#include "support/oracles.hpp"

using namespace predprey::arena;

namespace {

EnvState empty_env() {
  EnvState env;
  env.config.n_obstacles = 0;
  env.predator.kind = AgentKind::Predator;
  env.prey.kind = AgentKind::Prey;
  env.prey.position = {0.5, 0.5};
  return env;
}

AgentState agent_at(Vec2 p, double heading = 0.0, VisionArea vision = VisionArea::unbounded()) {
  AgentState s;
  s.position = p;
  s.heading = heading;
  s.vision = vision;
  return s;
}

double deg(double d) { return d * kPi / 180.0; }

}  // namespace

TEST(Fov, RadiusFromArea) {
  EXPECT_NEAR(fov_radius(1.0), 0.56419, 1e-5);
  EXPECT_NEAR(fov_radius(0.3), 0.30902, 1e-5);
  EXPECT_TRUE(std::isinf(fov_radius(VisionArea::unbounded())));
  EXPECT_THROW(fov_radius(0.0), std::invalid_argument);
  EXPECT_THROW(fov_radius(-1.0), std::invalid_argument);
  EXPECT_TRUE(VisionArea::of(INFINITY).is_unbounded());
}

TEST(Reset, NoObstaclesConfig) {
  Rng rng(3);
  ArenaConfig cfg;
  cfg.n_obstacles = 0;
  const EnvState env = reset(rng, cfg, {}, {});
  EXPECT_TRUE(env.obstacles.empty());
  EXPECT_LE(env.predator.position.norm(), cfg.arena_radius - cfg.agent_radius);
  EXPECT_LE(env.prey.position.norm(), cfg.arena_radius - cfg.agent_radius);
}

TEST(Reset, ThousandResetsNeverOverlap) {
  Rng rng(11);
  const ArenaConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    const EnvState env = reset(rng, cfg, {0.6, VisionArea::of(0.3)}, {});
    ASSERT_EQ(env.obstacles.size(), 3U);
    for (std::size_t a = 0; a < env.obstacles.size(); ++a) {
      EXPECT_LE(env.obstacles[a].norm(), 0.95 + 1e-12);
      for (std::size_t b = a + 1; b < env.obstacles.size(); ++b)
        EXPECT_GE(distance(env.obstacles[a], env.obstacles[b]), 2 * cfg.obstacle_radius);
      EXPECT_GE(distance(env.obstacles[a], env.predator.position), cfg.obstacle_radius + cfg.agent_radius);
      EXPECT_GE(distance(env.obstacles[a], env.prey.position), cfg.obstacle_radius + cfg.agent_radius);
    }
    EXPECT_GT(distance(env.predator.position, env.prey.position), 2 * cfg.agent_radius);
    EXPECT_LE(env.predator.position.norm(), cfg.arena_radius - cfg.agent_radius);
    EXPECT_LE(env.prey.position.norm(), cfg.arena_radius - cfg.agent_radius);
    EXPECT_EQ(env.step_index, 0);
    EXPECT_FALSE(env.done);
    EXPECT_EQ(env.predator.speed, 0.6);
  }
}

TEST(Reset, OverConstrainedConfigThrows) {
  Rng rng(1);
  ArenaConfig cfg;
  cfg.n_obstacles = 40;
  EXPECT_THROW(reset(rng, cfg, {}, {}), PlacementError);
}

TEST(ApplyAction, ForwardMovesSpeedTimesDt) {
  const EnvState env = empty_env();
  const AgentState s = agent_at({0, 0}, 0.0);
  const AgentState next = apply_action(s, Action::Forward, env);
  EXPECT_NEAR(next.position.x, 0.05, 1e-15);
  EXPECT_NEAR(next.position.y, 0.0, 1e-15);
  EXPECT_EQ(next.heading, 0.0);
}

TEST(ApplyAction, StayIsIdentity) {
  const EnvState env = empty_env();
  const AgentState s = agent_at({0.2, -0.3}, 1.0);
  const AgentState next = apply_action(s, Action::Stay, env);
  EXPECT_EQ(next.position, s.position);
  EXPECT_EQ(next.heading, s.heading);
}

TEST(ApplyAction, TurnsThenTranslates) {
  const EnvState env = empty_env();
  const AgentState s = agent_at({0.1, 0.2}, deg(10));
  // Rotate the unit heading vector by +-30 degrees with an explicit matrix.
  auto rotated = [&](double angle) {
    const double hx = std::cos(s.heading), hy = std::sin(s.heading);
    return Vec2{std::cos(angle) * hx - std::sin(angle) * hy, std::sin(angle) * hx + std::cos(angle) * hy};
  };
  const AgentState left = apply_action(s, Action::ForwardLeft, env);
  EXPECT_NEAR(left.heading, deg(40), 1e-12);
  const Vec2 dl = rotated(deg(30));
  EXPECT_NEAR(left.position.x, 0.1 + 0.05 * dl.x, 1e-12);
  EXPECT_NEAR(left.position.y, 0.2 + 0.05 * dl.y, 1e-12);

  const AgentState right = apply_action(s, Action::ForwardRight, env);
  EXPECT_NEAR(right.heading, deg(-20), 1e-12);
  const Vec2 dr = rotated(deg(-30));
  EXPECT_NEAR(right.position.x, 0.1 + 0.05 * dr.x, 1e-12);
  EXPECT_NEAR(right.position.y, 0.2 + 0.05 * dr.y, 1e-12);
}

TEST(ApplyAction, TurnScalesWithSpeed) {
  const EnvState env = empty_env();
  AgentState s = agent_at({0, 0}, 0.0);
  s.speed = 0.7;
  EXPECT_NEAR(apply_action(s, Action::ForwardLeft, env).heading, deg(42), 1e-12);
}

TEST(ApplyAction, ObstacleCancelsTranslationKeepsRotation) {
  EnvState env = empty_env();
  env.config.n_obstacles = 1;
  env.obstacles = {{0.42, 0.0}};
  const AgentState s = agent_at({0.0, 0.0}, deg(30));
  // Turning to heading 0 and moving 0.05 would leave the centers 0.37 apart,
  // inside the 0.39 contact distance.
  const AgentState next = apply_action(s, Action::ForwardRight, env);
  EXPECT_EQ(next.position, s.position);
  EXPECT_NEAR(next.heading, 0.0, 1e-12);
}

TEST(ApplyAction, WallClampsRadially) {
  const EnvState env = empty_env();
  const AgentState s = agent_at({1.24, 0.0}, 0.0);
  const AgentState next = apply_action(s, Action::Forward, env);
  EXPECT_NEAR(next.position.x, 1.26, 1e-12);
  EXPECT_NEAR(next.position.y, 0.0, 1e-12);
}

TEST(Visibility, CoincidentCentersAreVisible) {
  const std::vector<Vec2> obstacles{{0.0, 0.0}};
  const AgentState a = agent_at({0.2, 0.2}, 0.0, VisionArea::of(0.3));
  EXPECT_TRUE(is_visible(a, a, obstacles, 0.35));
}

TEST(Visibility, ObstacleOnSightLineBlocks) {
  const std::vector<Vec2> obstacles{{0.0, 0.0}};
  EXPECT_FALSE(is_visible(agent_at({-0.8, 0}), agent_at({0.8, 0}), obstacles, 0.35));
  EXPECT_TRUE(is_visible(agent_at({-0.8, 0.5}), agent_at({0.8, 0.5}), obstacles, 0.35));
}

TEST(Visibility, FieldOfViewRange) {
  const std::vector<Vec2> none;
  const AgentState observer = agent_at({0, 0}, 0.0, VisionArea::of(0.3));
  EXPECT_TRUE(is_visible(observer, agent_at({0.30, 0}), none, 0.35));
  EXPECT_FALSE(is_visible(observer, agent_at({0.31, 0}), none, 0.35));
}

TEST(Visibility, AgreesWithDenseSamplingOracle) {
  Rng rng(2024);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  const double r = 0.35;
  int compared = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<Vec2> obstacles;
    for (int k = 0; k < 3; ++k) {
      Vec2 c;
      do c = {u(rng), u(rng)};
      while (c.norm() > 0.95);
      obstacles.push_back(c);
    }
    auto outside = [&](Vec2 p) {
      if (p.norm() > 1.26) return false;
      for (const Vec2& c : obstacles)
        if (distance(p, c) < r) return false;
      return true;
    };
    Vec2 a, b;
    do a = {u(rng), u(rng)};
    while (!outside(a));
    do b = {u(rng), u(rng)};
    while (!outside(b));

    bool expected = false;
    bool near_boundary = false;
    for (const Vec2& c : obstacles) {
      const double d = oracle::sampled_segment_distance({a.x, a.y}, {b.x, b.y}, {c.x, c.y});
      if (std::fabs(d - r) <= 1e-6) near_boundary = true;
      if (d < r) expected = true;
    }
    if (near_boundary) continue;
    ++compared;
    ASSERT_EQ(is_occluded(a, b, obstacles, r), expected) << "config " << i;
  }
  EXPECT_GT(compared, 9990);
}

TEST(Visibility, OcclusionIsSymmetric) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 2000; ++i) {
    const std::vector<Vec2> obstacles{{u(rng) * 0.7, u(rng) * 0.7}, {u(rng) * 0.7, u(rng) * 0.7}};
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    EXPECT_EQ(is_occluded(a, b, obstacles, 0.35), is_occluded(b, a, obstacles, 0.35));
  }
}

TEST(Visibility, MonotoneInVisionArea) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  const std::vector<double> areas{0.1, 0.3, 1.0, 3.0, INFINITY};
  for (int i = 0; i < 2000; ++i) {
    const std::vector<Vec2> obstacles{{u(rng) * 0.7, u(rng) * 0.7}};
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    bool seen = false;
    for (double area : areas) {
      const bool vis = is_visible(agent_at(a, 0.0, VisionArea::of(area)), agent_at(b), obstacles, 0.35);
      if (seen) {
        EXPECT_TRUE(vis);
      }
      seen = seen || vis;
    }
  }
}

TEST(Observation, AdversaryAheadHasZeroBearing) {
  EnvState env = empty_env();
  env.predator = agent_at({0.1, 0.1}, deg(45));
  env.prey = agent_at({0.4, 0.4}, 1.5);
  const Observation obs = make_observation(env.predator, env.prey, env);
  EXPECT_TRUE(obs.adversary_visible);
  EXPECT_NEAR(obs.adversary.relative_angle, 0.0, 1e-12);
  EXPECT_NEAR(obs.adversary.distance, std::sqrt(0.18), 1e-12);
  EXPECT_EQ(obs.adversary.heading, 1.5);
}

TEST(Observation, OccludedAdversaryIsSentinel) {
  EnvState env = empty_env();
  env.config.n_obstacles = 1;
  env.obstacles = {{0.0, 0.0}};
  env.predator = agent_at({-0.8, 0});
  env.prey = agent_at({0.8, 0});
  const Observation obs = make_observation(env.predator, env.prey, env);
  EXPECT_FALSE(obs.adversary_visible);
  EXPECT_EQ(obs.adversary.relative_angle, -1.0);
  EXPECT_EQ(obs.adversary.distance, -1.0);
  EXPECT_EQ(obs.adversary.heading, -1.0);
  ASSERT_EQ(obs.obstacles.size(), 1U);
  EXPECT_NEAR(obs.obstacles[0].distance, 0.8, 1e-12);
  EXPECT_NEAR(obs.obstacles[0].relative_angle, 0.0, 1e-12);
}

TEST(Observation, SelfTripleAtCenter) {
  EnvState env = empty_env();
  env.predator = agent_at({0, 0}, 0.7);
  const Observation obs = make_observation(env.predator, env.prey, env);
  EXPECT_EQ(obs.self.global_distance, 0.0);
  EXPECT_EQ(obs.self.heading, 0.7);
}

TEST(Observation, FlatLayout) {
  Rng rng(4);
  const EnvState env = reset(rng, ArenaConfig{}, {}, {});
  const Observation obs = make_observation(env.predator, env.prey, env);
  const std::vector<float> v = obs.to_vector();
  ASSERT_EQ(v.size(), 12U);
  EXPECT_EQ(v[0], static_cast<float>(obs.adversary.relative_angle));
  EXPECT_EQ(v[3], static_cast<float>(obs.obstacles[0].relative_angle));
  EXPECT_EQ(v[8], static_cast<float>(obs.obstacles[2].distance));
  EXPECT_EQ(v[11], static_cast<float>(obs.self.heading));
}

TEST(Step, CaptureRewards) {
  EnvState env = empty_env();
  env.predator = agent_at({0.0, 0.0}, 0.0);
  env.prey = agent_at({0.12, 0.0}, 0.0);
  // Predator advances 0.05, prey stays: centers 0.07 apart.
  const StepResult r = step(env, Action::Forward, Action::Stay);
  EXPECT_TRUE(r.outcome.captured);
  EXPECT_EQ(r.outcome.predator_reward, 5.0);
  EXPECT_EQ(r.outcome.prey_reward, -5.0);
  EXPECT_TRUE(env.done);
  EXPECT_THROW(step(env, Action::Stay, Action::Stay), std::logic_error);
}

TEST(Step, TruncationAtStepLimit) {
  EnvState env = empty_env();
  env.predator = agent_at({-0.5, 0.0});
  env.prey = agent_at({0.5, 0.0});
  for (int i = 1; i < 400; ++i) {
    const StepResult r = step(env, Action::Stay, Action::Stay);
    ASSERT_FALSE(r.outcome.done());
    ASSERT_EQ(r.outcome.predator_reward, 0.0);
    ASSERT_EQ(r.outcome.prey_reward, 0.0);
  }
  const StepResult last = step(env, Action::Stay, Action::Stay);
  EXPECT_TRUE(last.outcome.truncated);
  EXPECT_FALSE(last.outcome.captured);
  EXPECT_EQ(last.outcome.predator_reward, -1.0);
  EXPECT_EQ(last.outcome.prey_reward, 0.0);
  EXPECT_EQ(last.outcome.step_index, 400);
}

TEST(Step, MovesAreSimultaneous) {
  Rng rng(9);
  EnvState env = reset(rng, ArenaConfig{}, {}, {});
  const EnvState before = env;
  step(env, Action::ForwardLeft, Action::ForwardRight);
  const AgentState p = apply_action(before.predator, Action::ForwardLeft, before);
  const AgentState q = apply_action(before.prey, Action::ForwardRight, before);
  EXPECT_EQ(env.predator.position, p.position);
  EXPECT_EQ(env.prey.position, q.position);
}

TEST(Label, LowestAndHighestBins) {
  const ArenaConfig cfg;
  EXPECT_EQ(relative_position_label(agent_at({0.3, 0.3}, -kPi), agent_at({0.3, 0.3}), cfg), 0);
  // Target 2.6 away at a bearing just below +pi.
  const double eps = 1e-9;
  const AgentState observer = agent_at({1.3, 0.0}, eps);
  EXPECT_EQ(relative_position_label(observer, agent_at({-1.3, 0.0}), cfg), 143);
}

TEST(Label, MatchesFloorDivisionOracle) {
  Rng rng(77);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  std::uniform_real_distribution<double> h(-kPi, kPi);
  const ArenaConfig cfg;
  for (int i = 0; i < 10000; ++i) {
    const AgentState a = agent_at({u(rng), u(rng)}, h(rng));
    const AgentState b = agent_at({u(rng), u(rng)});
    const int label = relative_position_label(a, b, cfg);
    ASSERT_GE(label, 0);
    ASSERT_LE(label, 143);
    const double dx = b.position.x - a.position.x, dy = b.position.y - a.position.y;
    const double d = std::hypot(dx, dy);
    double theta = std::atan2(dy, dx) - a.heading;
    while (theta < -kPi) theta += 2 * kPi;
    while (theta >= kPi) theta -= 2 * kPi;
    const int dbin = std::min(7, static_cast<int>(d / (2.6 / 8)));
    const int abin = std::min(17, static_cast<int>((theta + kPi) / deg(20)));
    ASSERT_EQ(label, dbin * 18 + abin) << "pair " << i;
  }
}

TEST(Properties, ContainmentExclusionAndSentinels) {
  Rng rng(31);
  std::uniform_int_distribution<int> act(0, 3);
  const ArenaConfig cfg;
  for (int episode = 0; episode < 50; ++episode) {
    EnvState env = reset(rng, cfg, {0.7, VisionArea::of(0.3)}, {0.5, VisionArea::of(1.0)});
    while (!env.done) {
      const StepResult r = step(env, action_from_index(act(rng)), action_from_index(act(rng)));
      for (const AgentState* s : {&env.predator, &env.prey}) {
        ASSERT_LE(s->position.norm(), cfg.arena_radius - cfg.agent_radius + 1e-9);
        for (const Vec2& c : env.obstacles)
          ASSERT_GE(distance(s->position, c), cfg.obstacle_radius + cfg.agent_radius - 1e-9);
      }
      ASSERT_EQ(r.predator_obs.adversary.is_sentinel(),
                !is_visible(env.predator, env.prey, env.obstacles, cfg.obstacle_radius));
      ASSERT_EQ(r.prey_obs.adversary.is_sentinel(),
                !is_visible(env.prey, env.predator, env.obstacles, cfg.obstacle_radius));
    }
  }
}

TEST(Properties, TrajectoriesAreDeterministic) {
  auto run = [] {
    Rng rng(123);
    Rng actions(456);
    std::uniform_int_distribution<int> act(0, 3);
    EnvState env = reset(rng, ArenaConfig{}, {}, {});
    std::vector<double> trace;
    for (int i = 0; i < 300 && !env.done; ++i) {
      step(env, action_from_index(act(actions)), action_from_index(act(actions)));
      trace.insert(trace.end(), {env.predator.position.x, env.predator.position.y, env.predator.heading,
                                 env.prey.position.x, env.prey.position.y, env.prey.heading});
    }
    return trace;
  };
  EXPECT_EQ(run(), run());
}

TEST(Trace, WritesEpisodeAndStepRecords) {
  Rng rng(2);
  EnvState env = reset(rng, ArenaConfig{}, {}, {});
  std::ostringstream out;
  TraceWriter writer(out);
  writer.begin_episode(0, env);
  const StepResult r = step(env, Action::Forward, Action::ForwardLeft);
  writer.record_step(0, env, Action::Forward, Action::ForwardLeft, r);

  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  const auto episode = nlohmann::json::parse(line);
  EXPECT_EQ(episode.at("type"), "episode");
  EXPECT_EQ(episode.at("obstacles").size(), 3U);
  std::getline(in, line);
  const auto rec = nlohmann::json::parse(line);
  EXPECT_EQ(rec.at("type"), "step");
  EXPECT_EQ(rec.at("step"), 1);
  EXPECT_EQ(rec.at("predator_action"), 0);
  EXPECT_EQ(rec.at("prey_action"), 2);
  EXPECT_DOUBLE_EQ(rec.at("predator").at("x").get<double>(), env.predator.position.x);
}

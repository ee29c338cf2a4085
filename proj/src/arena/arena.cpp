#include "predprey/arena/arena.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace predprey::arena {

double Vec2::norm() const { return std::hypot(x, y); }

double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

double normalize_angle(double radians) {
  double wrapped = std::fmod(radians + kPi, 2.0 * kPi);
  if (wrapped < 0.0) wrapped += 2.0 * kPi;
  double result = wrapped - kPi;
  // fmod can land exactly on the excluded upper bound after the shift.
  if (result >= kPi) result -= 2.0 * kPi;
  return result;
}

void ArenaConfig::validate() const {
  if (!(agent_radius > 0.0)) throw std::invalid_argument("agent_radius must be positive");
  if (!(obstacle_radius > agent_radius))
    throw std::invalid_argument("obstacle_radius must exceed agent_radius");
  if (!(arena_radius > obstacle_radius))
    throw std::invalid_argument("arena_radius must exceed obstacle_radius");
  if (n_obstacles < 0) throw std::invalid_argument("n_obstacles must be non-negative");
  if (max_episode_steps < 1) throw std::invalid_argument("max_episode_steps must be at least 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(turn_rate_coeff > 0.0)) throw std::invalid_argument("turn_rate_coeff must be positive");
}

VisionArea VisionArea::of(double area) {
  if (std::isinf(area) && area > 0.0) return unbounded();
  if (!(area > 0.0)) throw std::invalid_argument("vision area must be positive, got " + std::to_string(area));
  VisionArea v;
  v.unbounded_ = false;
  v.area_ = area;
  return v;
}

double VisionArea::area() const {
  return unbounded_ ? std::numeric_limits<double>::infinity() : area_;
}

double fov_radius(VisionArea vision) {
  if (vision.is_unbounded()) return std::numeric_limits<double>::infinity();
  return std::sqrt(vision.area() / kPi);
}

double fov_radius(double area) { return fov_radius(VisionArea::of(area)); }

std::string_view to_string(AgentKind kind) {
  return kind == AgentKind::Predator ? "predator" : "prey";
}

Action action_from_index(int index) {
  if (index < 0 || index >= kActionCount)
    throw std::out_of_range("action index out of range: " + std::to_string(index));
  return static_cast<Action>(index);
}

namespace {

Vec2 sample_in_disc(Rng& rng, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  const double r = radius * std::sqrt(unit(rng));
  const double a = angle(rng);
  return {r * std::cos(a), r * std::sin(a)};
}

bool clear_of_obstacles(Vec2 p, const std::vector<Vec2>& obstacles, double min_gap) {
  for (const Vec2& c : obstacles) {
    if (distance(p, c) < min_gap) return false;
  }
  return true;
}

template <typename Accept>
Vec2 place(Rng& rng, double radius, Accept accept, const char* what) {
  for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
    Vec2 p = sample_in_disc(rng, radius);
    if (accept(p)) return p;
  }
  throw PlacementError(std::string("could not place ") + what + " after " +
                       std::to_string(kMaxPlacementAttempts) + " attempts; config is over-constrained");
}

AgentState make_agent(Vec2 position, double heading, const AgentSpec& spec, AgentKind kind) {
  if (!(spec.speed > 0.0)) throw std::invalid_argument("agent speed must be positive");
  AgentState s;
  s.position = position;
  s.heading = normalize_angle(heading);
  s.speed = spec.speed;
  s.vision = spec.vision;
  s.kind = kind;
  return s;
}

}  // namespace

EnvState reset(Rng& rng, const ArenaConfig& config, const AgentSpec& predator,
               const AgentSpec& prey) {
  config.validate();
  EnvState env;
  env.config = config;
  env.obstacles.reserve(static_cast<std::size_t>(config.n_obstacles));

  const double obstacle_span = config.arena_radius - config.obstacle_radius;
  for (int i = 0; i < config.n_obstacles; ++i) {
    Vec2 c = place(
        rng, obstacle_span,
        [&](Vec2 p) { return clear_of_obstacles(p, env.obstacles, 2.0 * config.obstacle_radius); },
        "obstacle");
    env.obstacles.push_back(c);
  }

  const double agent_span = config.arena_radius - config.agent_radius;
  const double obstacle_gap = config.obstacle_radius + config.agent_radius;
  std::uniform_real_distribution<double> heading(-kPi, kPi);

  Vec2 pred_pos = place(
      rng, agent_span, [&](Vec2 p) { return clear_of_obstacles(p, env.obstacles, obstacle_gap); },
      "predator");
  Vec2 prey_pos = place(
      rng, agent_span,
      [&](Vec2 p) {
        return clear_of_obstacles(p, env.obstacles, obstacle_gap) &&
               distance(p, pred_pos) > 2.0 * config.agent_radius;
      },
      "prey");

  env.predator = make_agent(pred_pos, heading(rng), predator, AgentKind::Predator);
  env.prey = make_agent(prey_pos, heading(rng), prey, AgentKind::Prey);
  env.step_index = 0;
  env.done = false;
  return env;
}

AgentState apply_action(const AgentState& state, Action action, const EnvState& env) {
  if (action == Action::Stay) return state;

  const ArenaConfig& cfg = env.config;
  AgentState next = state;
  const double turn = cfg.turn_rate_coeff * state.speed * kPi / 180.0;
  if (action == Action::ForwardRight) next.heading = normalize_angle(state.heading - turn);
  if (action == Action::ForwardLeft) next.heading = normalize_angle(state.heading + turn);

  const double step = state.speed * cfg.dt;
  Vec2 candidate = state.position + step * Vec2{std::cos(next.heading), std::sin(next.heading)};

  const double limit = cfg.arena_radius - cfg.agent_radius;
  const double r = candidate.norm();
  if (r > limit) candidate = (limit / r) * candidate;

  const double gap = cfg.obstacle_radius + cfg.agent_radius;
  if (clear_of_obstacles(candidate, env.obstacles, gap)) next.position = candidate;
  return next;
}

std::vector<float> Observation::to_vector() const {
  std::vector<float> out(6 + 2 * obstacles.size());
  write_to(out);
  return out;
}

void Observation::write_to(std::span<float> out) const {
  if (out.size() != 6 + 2 * obstacles.size())
    throw std::invalid_argument("observation buffer has wrong size");
  std::size_t k = 0;
  out[k++] = static_cast<float>(adversary.relative_angle);
  out[k++] = static_cast<float>(adversary.distance);
  out[k++] = static_cast<float>(adversary.heading);
  for (const ObstacleReading& o : obstacles) {
    out[k++] = static_cast<float>(o.relative_angle);
    out[k++] = static_cast<float>(o.distance);
  }
  out[k++] = static_cast<float>(self.global_angle);
  out[k++] = static_cast<float>(self.global_distance);
  out[k++] = static_cast<float>(self.heading);
}

namespace {

double bearing(const AgentState& from, Vec2 to) {
  const Vec2 d = to - from.position;
  return normalize_angle(std::atan2(d.y, d.x) - from.heading);
}

}  // namespace

Observation make_observation(const AgentState& agent, const AgentState& adversary,
                             const EnvState& env) {
  Observation obs;
  obs.adversary_visible = is_visible(agent, adversary, env.obstacles, env.config.obstacle_radius);
  if (obs.adversary_visible) {
    obs.adversary.relative_angle = bearing(agent, adversary.position);
    obs.adversary.distance = distance(agent.position, adversary.position);
    obs.adversary.heading = adversary.heading;
  }
  obs.obstacles.reserve(env.obstacles.size());
  for (const Vec2& c : env.obstacles) {
    obs.obstacles.push_back({bearing(agent, c), distance(agent.position, c)});
  }
  obs.self.global_angle = std::atan2(agent.position.y, agent.position.x);
  obs.self.global_distance = agent.position.norm();
  obs.self.heading = agent.heading;
  return obs;
}

StepResult step(EnvState& env, Action predator_action, Action prey_action) {
  if (env.done) throw std::logic_error("step called on a terminal environment; reset it first");

  AgentState predator = apply_action(env.predator, predator_action, env);
  AgentState prey = apply_action(env.prey, prey_action, env);
  env.predator = predator;
  env.prey = prey;
  env.step_index += 1;

  StepResult result;
  StepOutcome& out = result.outcome;
  out.step_index = env.step_index;
  out.captured = distance(predator.position, prey.position) <= 2.0 * env.config.agent_radius;
  if (out.captured) {
    out.predator_reward = kCaptureReward;
    out.prey_reward = -kCaptureReward;
  } else if (env.step_index >= env.config.max_episode_steps) {
    out.truncated = true;
    out.predator_reward = kTruncationPenalty;
  }
  env.done = out.done();

  result.predator_obs = make_observation(env.predator, env.prey, env);
  result.prey_obs = make_observation(env.prey, env.predator, env);
  return result;
}

int relative_position_label(const AgentState& observer, const AgentState& target,
                            const ArenaConfig& config) {
  const double d = distance(observer.position, target.position);
  const double bin_width = 2.0 * config.arena_radius / kDistanceBins;
  int distance_bin = static_cast<int>(std::floor(d / bin_width));
  if (distance_bin >= kDistanceBins) distance_bin = kDistanceBins - 1;

  const double theta = bearing(observer, target.position);
  int angle_bin = static_cast<int>(std::floor((theta + kPi) / (2.0 * kPi / kAngleBins)));
  if (angle_bin >= kAngleBins) angle_bin = kAngleBins - 1;
  if (angle_bin < 0) angle_bin = 0;
  return distance_bin * kAngleBins + angle_bin;
}

}  // namespace predprey::arena

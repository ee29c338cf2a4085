#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace predprey::arena {

using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const;
};

double distance(Vec2 a, Vec2 b);

// Wraps an angle into [-pi, pi).
double normalize_angle(double radians);

struct ArenaConfig {
  double arena_radius = 1.3;
  int n_obstacles = 3;
  double obstacle_radius = 0.35;
  double agent_radius = 0.04;
  double dt = 0.1;
  // Degrees turned per unit of speed on each turning step.
  double turn_rate_coeff = 60.0;
  int max_episode_steps = 400;

  // Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
  int observation_dim() const { return 6 + 2 * n_obstacles; }
};

// Area of the circular field of view; unbounded means the whole arena.
class VisionArea {
 public:
  static VisionArea unbounded() { return VisionArea(); }
  // Throws std::invalid_argument unless area > 0 (infinity maps to unbounded).
  static VisionArea of(double area);

  bool is_unbounded() const { return unbounded_; }
  // +inf when unbounded.
  double area() const;

  friend bool operator==(const VisionArea&, const VisionArea&) = default;

 private:
  VisionArea() = default;
  bool unbounded_ = true;
  double area_ = 0.0;
};

double fov_radius(VisionArea vision);
// Same as fov_radius(VisionArea::of(area)); rejects non-positive areas.
double fov_radius(double area);

enum class AgentKind : std::uint8_t { Predator, Prey };

std::string_view to_string(AgentKind kind);

enum class Action : std::uint8_t { Forward = 0, ForwardRight = 1, ForwardLeft = 2, Stay = 3 };

inline constexpr int kActionCount = 4;

Action action_from_index(int index);
inline int to_index(Action a) { return static_cast<int>(a); }

// Physical and sensory parameters an agent is instantiated with.
struct AgentSpec {
  double speed = 0.5;
  VisionArea vision = VisionArea::unbounded();
};

struct AgentState {
  Vec2 position;
  double heading = 0.0;
  double speed = 0.5;
  VisionArea vision = VisionArea::unbounded();
  AgentKind kind = AgentKind::Predator;
};

struct EnvState {
  ArenaConfig config;
  std::vector<Vec2> obstacles;
  AgentState predator;
  AgentState prey;
  int step_index = 0;
  bool done = false;
};

// Thrown when rejection sampling cannot place all discs.
class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxPlacementAttempts = 10'000;

EnvState reset(Rng& rng, const ArenaConfig& config, const AgentSpec& predator,
               const AgentSpec& prey);

AgentState apply_action(const AgentState& state, Action action, const EnvState& env);

// Segment-vs-disc occlusion test, ignoring field-of-view range.
bool is_occluded(Vec2 from, Vec2 to, std::span<const Vec2> obstacles, double obstacle_radius);

bool is_visible(const AgentState& observer, const AgentState& target,
                std::span<const Vec2> obstacles, double obstacle_radius);

struct AdversaryReading {
  double relative_angle = -1.0;
  double distance = -1.0;
  double heading = -1.0;

  static AdversaryReading hidden() { return {}; }
  bool is_sentinel() const { return relative_angle == -1.0 && distance == -1.0 && heading == -1.0; }
  friend bool operator==(const AdversaryReading&, const AdversaryReading&) = default;
};

struct ObstacleReading {
  double relative_angle = 0.0;
  double distance = 0.0;
};

struct SelfReading {
  double global_angle = 0.0;
  double global_distance = 0.0;
  double heading = 0.0;
};

struct Observation {
  AdversaryReading adversary;
  std::vector<ObstacleReading> obstacles;
  SelfReading self;
  bool adversary_visible = false;

  // Flattened as [adversary(3), obstacles(2 each), self(3)].
  std::vector<float> to_vector() const;
  void write_to(std::span<float> out) const;
};

Observation make_observation(const AgentState& agent, const AgentState& adversary,
                             const EnvState& env);

struct StepOutcome {
  double predator_reward = 0.0;
  double prey_reward = 0.0;
  bool captured = false;
  bool truncated = false;
  int step_index = 0;

  bool done() const { return captured || truncated; }
};

inline constexpr double kCaptureReward = 5.0;
inline constexpr double kTruncationPenalty = -1.0;

struct StepResult {
  Observation predator_obs;
  Observation prey_obs;
  StepOutcome outcome;
};

// Advances both agents from the same snapshot. Throws std::logic_error on a
// terminal env.
StepResult step(EnvState& env, Action predator_action, Action prey_action);

inline constexpr int kDistanceBins = 8;
inline constexpr int kAngleBins = 18;
inline constexpr int kLocationClasses = kDistanceBins * kAngleBins;

// Ground-truth class of the target's position in the observer's egocentric frame.
int relative_position_label(const AgentState& observer, const AgentState& target,
                            const ArenaConfig& config);

}  // namespace predprey::arena

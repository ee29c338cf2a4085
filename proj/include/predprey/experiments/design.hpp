#pragma once

#include <array>
#include <string>
#include <vector>

#include "predprey/arena/arena.hpp"
#include "predprey/ppo/config.hpp"

namespace predprey::experiments {

inline constexpr std::array<double, 5> kGridSpeeds = {0.50, 0.55, 0.60, 0.65, 0.70};
inline constexpr std::array<double, 2> kGridBoundedVisions = {0.3, 1.0};
inline constexpr std::array<double, 3> kGridGammas = {0.90, 0.93, 0.99};
inline constexpr double kAverageSpeed = 0.60;
inline constexpr double kPreySpeed = 0.50;
inline constexpr int kLevels = 3;

// One predator configuration. Levels are ordinal (0 = weakest): vision
// short/medium/long, planning low/mid/high.
struct DesignPoint {
  double speed = kAverageSpeed;
  arena::VisionArea vision = arena::VisionArea::unbounded();
  double gamma = 0.99;
  int vision_level = 2;
  int planning_level = 2;

  // Grid member; levels are inferred. Throws std::invalid_argument for values
  // outside the grid.
  static DesignPoint on_grid(double speed, arena::VisionArea vision, double gamma);
  // Arbitrary values with caller-chosen levels.
  static DesignPoint custom(double speed, arena::VisionArea vision, double gamma, int vision_level,
                            int planning_level);

  ppo::AgentDesign agent() const { return {{speed, vision}, gamma}; }
  std::string label() const;

  friend bool operator==(const DesignPoint&, const DesignPoint&) = default;
};

int vision_level_of(arena::VisionArea vision);
int planning_level_of(double gamma);
arena::VisionArea grid_vision(int level);
const char* vision_name(int level);
const char* planning_name(int level);

// All speed x vision x gamma combinations of the given axes; defaults to the
// full 5 x 3 x 3 grid.
std::vector<DesignPoint> design_grid(const std::vector<double>& speeds = {kGridSpeeds.begin(), kGridSpeeds.end()},
                                     const std::vector<arena::VisionArea>& visions = {},
                                     const std::vector<double>& gammas = {kGridGammas.begin(), kGridGammas.end()});

// Prey held constant across the grid: speed 0.50, unbounded vision, gamma 0.99.
ppo::AgentDesign default_prey();

}  // namespace predprey::experiments

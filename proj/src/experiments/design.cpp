#include "predprey/experiments/design.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace predprey::experiments {

namespace {

bool close(double a, double b) { return std::abs(a - b) < 1e-9; }

}  // namespace

int vision_level_of(arena::VisionArea vision) {
  if (vision.is_unbounded()) return 2;
  for (std::size_t i = 0; i < kGridBoundedVisions.size(); ++i) {
    if (close(vision.area(), kGridBoundedVisions[i])) return static_cast<int>(i);
  }
  throw std::invalid_argument("vision area " + std::to_string(vision.area()) + " is not on the design grid");
}

int planning_level_of(double gamma) {
  for (std::size_t i = 0; i < kGridGammas.size(); ++i) {
    if (close(gamma, kGridGammas[i])) return static_cast<int>(i);
  }
  throw std::invalid_argument("gamma " + std::to_string(gamma) + " is not on the design grid");
}

arena::VisionArea grid_vision(int level) {
  if (level == 2) return arena::VisionArea::unbounded();
  if (level == 0 || level == 1) return arena::VisionArea::of(kGridBoundedVisions[static_cast<std::size_t>(level)]);
  throw std::out_of_range("vision level must be 0, 1 or 2");
}

const char* vision_name(int level) {
  static constexpr std::array<const char*, 3> names = {"short", "medium", "long"};
  return (level >= 0 && level < 3) ? names[static_cast<std::size_t>(level)] : "custom";
}

const char* planning_name(int level) {
  static constexpr std::array<const char*, 3> names = {"low", "mid", "high"};
  return (level >= 0 && level < 3) ? names[static_cast<std::size_t>(level)] : "custom";
}

DesignPoint DesignPoint::on_grid(double speed, arena::VisionArea vision, double gamma) {
  bool speed_ok = false;
  for (double s : kGridSpeeds) speed_ok = speed_ok || close(s, speed);
  if (!speed_ok) throw std::invalid_argument("speed " + std::to_string(speed) + " is not on the design grid");
  return custom(speed, vision, gamma, vision_level_of(vision), planning_level_of(gamma));
}

DesignPoint DesignPoint::custom(double speed, arena::VisionArea vision, double gamma, int vision_level,
                                int planning_level) {
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  DesignPoint d;
  d.speed = speed;
  d.vision = vision;
  d.gamma = gamma;
  d.vision_level = vision_level;
  d.planning_level = planning_level;
  return d;
}

std::string DesignPoint::label() const {
  std::ostringstream os;
  os << "speed" << speed << "_vision";
  if (vision.is_unbounded())
    os << "inf";
  else
    os << vision.area();
  os << "_gamma" << gamma;
  return os.str();
}

std::vector<DesignPoint> design_grid(const std::vector<double>& speeds, const std::vector<arena::VisionArea>& visions,
                                     const std::vector<double>& gammas) {
  std::vector<arena::VisionArea> vis = visions;
  if (vis.empty()) vis = {grid_vision(0), grid_vision(1), grid_vision(2)};
  std::vector<DesignPoint> grid;
  for (double s : speeds) {
    for (const arena::VisionArea& v : vis) {
      for (double g : gammas) grid.push_back(DesignPoint::on_grid(s, v, g));
    }
  }
  return grid;
}

ppo::AgentDesign default_prey() { return {{kPreySpeed, arena::VisionArea::unbounded()}, 0.99}; }

}  // namespace predprey::experiments

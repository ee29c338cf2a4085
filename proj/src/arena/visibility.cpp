#include <algorithm>
#include <cmath>

#include "predprey/arena/arena.hpp"

namespace predprey::arena {

namespace {

// Squared distance from p to the closed segment [a, b].
double segment_distance_sq(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 ab = b - a;
  const double len_sq = ab.dot(ab);
  double t = 0.0;
  if (len_sq > 0.0) t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  const Vec2 closest = a + t * ab;
  const Vec2 d = p - closest;
  return d.dot(d);
}

}  // namespace

bool is_occluded(Vec2 from, Vec2 to, std::span<const Vec2> obstacles, double obstacle_radius) {
  if (from == to) return false;
  const double r_sq = obstacle_radius * obstacle_radius;
  return std::any_of(obstacles.begin(), obstacles.end(),
                     [&](Vec2 c) { return segment_distance_sq(from, to, c) < r_sq; });
}

bool is_visible(const AgentState& observer, const AgentState& target,
                std::span<const Vec2> obstacles, double obstacle_radius) {
  const double d = distance(observer.position, target.position);
  if (d > fov_radius(observer.vision)) return false;
  return !is_occluded(observer.position, target.position, obstacles, obstacle_radius);
}

}  // namespace predprey::arena

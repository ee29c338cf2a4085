#include "predprey/experiments/energy.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace predprey::experiments {

double compute_sigma(std::span<const double> gains) {
  if (gains.empty()) throw std::invalid_argument("compute_sigma: empty result set");
  const double n = static_cast<double>(gains.size());
  const double mean = std::accumulate(gains.begin(), gains.end(), 0.0) / n;
  double sq = 0.0;
  for (double g : gains) sq += (g - mean) * (g - mean);
  return std::sqrt(sq / n);
}

double compute_sigma(const SweepResult& result) {
  std::vector<double> gains;
  gains.reserve(result.rows.size());
  // Designs whose every run failed carry NaN and have no gain to contribute.
  for (const SweepRow& r : result.rows)
    if (!std::isnan(r.captures)) gains.push_back(r.captures);
  return compute_sigma(gains);
}

double cost_multiplier(std::string_view name) {
  if (name == "0") return 0.0;
  if (name == "sigma") return 1.0;
  if (name == "2sigma") return 2.0;
  throw std::invalid_argument("cost must be one of 0, sigma, 2sigma; got '" + std::string(name) + "'");
}

namespace {

void pick_optimum(NetEnergy& e) {
  double best = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < kLevels; ++v) {
    for (int p = 0; p < kLevels; ++p) {
      const double net = e.net[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)];
      if (net > best) {
        best = net;
        e.best_vision = v;
        e.best_planning = p;
      }
    }
  }
}

}  // namespace

NetEnergy net_energy(const std::array<std::array<double, 3>, 3>& gross, const EnergyCosts& costs) {
  if (costs.vision_cost < 0.0 || costs.planning_cost < 0.0) throw std::invalid_argument("energy costs must be >= 0");
  NetEnergy e;
  e.costs = costs;
  for (int v = 0; v < kLevels; ++v) {
    for (int p = 0; p < kLevels; ++p) {
      const auto vi = static_cast<std::size_t>(v);
      const auto pi = static_cast<std::size_t>(p);
      e.cells[vi][pi].design = DesignPoint::on_grid(kAverageSpeed, grid_vision(v), kGridGammas[pi]);
      e.cells[vi][pi].captures = gross[vi][pi];
      e.net[vi][pi] = gross[vi][pi] - v * costs.vision_cost - p * costs.planning_cost;
    }
  }
  pick_optimum(e);
  return e;
}

NetEnergy net_energy(const SweepResult& result, const EnergyCosts& costs, double speed) {
  std::array<std::array<double, 3>, 3> gross{};
  std::array<std::array<const SweepRow*, 3>, 3> found{};
  for (const SweepRow& r : result.rows) {
    if (std::abs(r.design.speed - speed) > 1e-9) continue;
    const int v = r.design.vision_level;
    const int p = r.design.planning_level;
    if (v < 0 || v >= kLevels || p < 0 || p >= kLevels || std::isnan(r.captures)) continue;
    found[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)] = &r;
    gross[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)] = r.captures;
  }
  for (int v = 0; v < kLevels; ++v) {
    for (int p = 0; p < kLevels; ++p) {
      if (found[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)] == nullptr)
        throw std::invalid_argument(std::string("net_energy: missing cell (vision ") + vision_name(v) +
                                    ", planning " + planning_name(p) + ") at speed " + std::to_string(speed));
    }
  }
  NetEnergy e = net_energy(gross, costs);
  for (int v = 0; v < kLevels; ++v) {
    for (int p = 0; p < kLevels; ++p) {
      e.cells[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)] =
          *found[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)];
    }
  }
  return e;
}

}  // namespace predprey::experiments

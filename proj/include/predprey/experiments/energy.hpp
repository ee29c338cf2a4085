#pragma once

#include <span>
#include <string_view>

#include "predprey/experiments/results.hpp"

namespace predprey::experiments {

// Population standard deviation of all capture counts in the result.
double compute_sigma(const SweepResult& result);
double compute_sigma(std::span<const double> gains);

// Cost multiplier named on the command line: "0", "sigma" or "2sigma".
double cost_multiplier(std::string_view name);

// net[v][p] = gross[v][p] - v * vision_cost - p * planning_cost over the slice
// at `speed`. The optimum is the largest net gain; ties go to the lowest
// (vision, planning) pair. Throws std::invalid_argument if a cell is missing.
NetEnergy net_energy(const SweepResult& result, const EnergyCosts& costs, double speed = kAverageSpeed);

// Same over an explicit [vision][planning] grid of gross gains.
NetEnergy net_energy(const std::array<std::array<double, 3>, 3>& gross, const EnergyCosts& costs);

}  // namespace predprey::experiments

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "predprey/experiments/design.hpp"

namespace predprey::experiments {

struct SweepRow {
  DesignPoint design;
  // Captures per evaluation budget, aggregated over seeds.
  double captures = 0.0;
  int seeds = 0;
  long updates = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepMetadata {
  std::vector<std::uint64_t> seeds;
  long updates = 0;
  std::string config_hash;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepMetadata metadata;

  // Throws std::out_of_range when the design is absent.
  const SweepRow& at(const DesignPoint& design) const;
};

struct EnergyCosts {
  double vision_cost = 0.0;    // per vision level
  double planning_cost = 0.0;  // per planning level
};

// Net gain over the 3 x 3 vision x planning slice at one speed.
struct NetEnergy {
  std::array<std::array<SweepRow, 3>, 3> cells{};  // [vision][planning]
  std::array<std::array<double, 3>, 3> net{};
  EnergyCosts costs;
  int best_vision = 0;
  int best_planning = 0;

  double best() const { return net[static_cast<std::size_t>(best_vision)][static_cast<std::size_t>(best_planning)]; }
};

struct CrossEvalRow {
  DesignPoint design;  // the predator as trained
  std::string prey_variant;
  arena::VisionArea eval_vision = arena::VisionArea::unbounded();
  long captures = 0;
  long steps = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const CrossEvalRow&, const CrossEvalRow&) = default;
};

// Column order is stable; unbounded vision is written as "inf".
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
SweepResult read_sweep_csv(const std::filesystem::path& path);

void write_energy_csv(const std::filesystem::path& path, const std::vector<NetEnergy>& tables);

void write_cross_eval_csv(const std::filesystem::path& path, const std::vector<CrossEvalRow>& rows);
std::vector<CrossEvalRow> read_cross_eval_csv(const std::filesystem::path& path);

// Shortest text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace predprey::experiments

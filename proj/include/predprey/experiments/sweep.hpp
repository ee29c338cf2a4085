#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "predprey/experiments/config_file.hpp"
#include "predprey/experiments/results.hpp"

namespace predprey::experiments {

// One line of the append-only run ledger (runs.csv in the sweep directory).
struct RunRecord {
  std::string hash;
  DesignPoint design;
  std::uint64_t seed = 0;
  bool ok = false;
  long captures = 0;
  std::string manifest;
  std::string error;
};

std::vector<RunRecord> read_run_ledger(const std::filesystem::path& path);

// Trains and evaluates one (design, seed) pair into out_dir/runs/<hash>/,
// writing checkpoints, the training log and manifest.json.
RunRecord execute_run(const ExperimentConfig& config, const DesignPoint& design, std::uint64_t seed,
                      const std::filesystem::path& out_dir);

double aggregate(std::vector<double> values, Aggregate how);

using ProgressFn = std::function<void(const std::string&)>;

// Runs every (design, seed) pair not already recorded as successful in
// out_dir/runs.csv, then aggregates captures across seeds into one row per
// design (NaN captures and seeds = 0 when every seed failed). Writes
// out_dir/sweep_results.csv. Failed runs are recorded and the sweep continues.
SweepResult run_sweep(const std::vector<DesignPoint>& grid, const ExperimentConfig& config,
                      const std::filesystem::path& out_dir, const ProgressFn& progress = {});

}  // namespace predprey::experiments

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "predprey/arena/arena.hpp"
#include "predprey/experiments/controller.hpp"
#include "predprey/experiments/design.hpp"
#include "predprey/nn/net_config.hpp"
#include "predprey/ppo/config.hpp"

namespace predprey::experiments {

enum class Aggregate { Median, Mean };

// Everything a sweep needs. Serialized as JSON with sections "arena", "net",
// "ppo", "prey", "grid", "evaluation" and top-level "seeds", "workers",
// "aggregate", "out_dir". Missing keys keep their defaults.
struct ExperimentConfig {
  arena::ArenaConfig arena;
  nn::NetConfig net;
  ppo::PPOConfig ppo;
  ppo::AgentDesign prey = default_prey();
  std::vector<double> speeds{kGridSpeeds.begin(), kGridSpeeds.end()};
  std::vector<arena::VisionArea> visions{grid_vision(0), grid_vision(1), grid_vision(2)};
  std::vector<double> gammas{kGridGammas.begin(), kGridGammas.end()};
  std::vector<std::uint64_t> seeds{0};
  long eval_steps = 10'000;
  std::uint64_t eval_seed = 12345;
  PolicyMode eval_mode = PolicyMode::Sampled;
  Aggregate aggregate = Aggregate::Median;
  int workers = 1;
  std::string out_dir = "runs";

  std::vector<DesignPoint> grid() const { return design_grid(speeds, visions, gammas); }
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

nlohmann::json to_json(const arena::ArenaConfig& c);
nlohmann::json to_json(const ppo::PPOConfig& c);
arena::ArenaConfig arena_config_from_json(const nlohmann::json& j);
ppo::PPOConfig ppo_config_from_json(const nlohmann::json& j);

// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

// Resume key of one (design, seed) run under `config`.
std::string run_hash(const ExperimentConfig& config, const DesignPoint& design, std::uint64_t seed);

}  // namespace predprey::experiments

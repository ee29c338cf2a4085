#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "predprey/arena/arena.hpp"
#include "predprey/nn/adam.hpp"
#include "predprey/nn/net_config.hpp"
#include "predprey/ppo/buffer.hpp"
#include "predprey/ppo/config.hpp"
#include "predprey/ppo/losses.hpp"

namespace predprey::ppo {

struct TrainerSetup {
  arena::ArenaConfig arena;
  nn::NetConfig net;
  PPOConfig ppo;
  AgentDesign predator;
  AgentDesign prey;
  std::uint64_t seed = 0;

  void validate() const;
};

// Independent stream `stream` of a run seeded with `seed`.
arena::Rng derive_stream(std::uint64_t seed, std::uint64_t stream);

struct RolloutPair {
  RolloutBuffer predator;
  RolloutBuffer prey;
};

struct EpisodeTally {
  long episodes = 0;
  long captures = 0;
  long truncations = 0;
  double predator_return_sum = 0.0;
  double prey_return_sum = 0.0;
};

struct AgentUpdateStats {
  LossBreakdown<float> losses;
  float grad_norm = 0.0f;
};

struct UpdateStats {
  long update = 0;
  double lr = 0.0;
  AgentUpdateStats predator;
  AgentUpdateStats prey;
};

struct LogRow {
  long update = 0;
  long env_steps = 0;
  double lr = 0.0;
  double captures_per_episode = 0.0;
  double mean_predator_return = 0.0;
  double mean_prey_return = 0.0;
  LossBreakdown<float> predator;
  LossBreakdown<float> prey;
};

void write_log_header(std::ostream& out);
void write_log_row(std::ostream& out, const LogRow& row);

class Trainer {
 public:
  explicit Trainer(const TrainerSetup& setup);

  // T steps in each of the N envs with both policies sampling actions.
  RolloutPair collect_rollout();

  // One clipped-PPO step for each agent from its own buffer, at the learning
  // rate scheduled for the current update counter.
  UpdateStats update(const RolloutPair& rollout);

  // Gradients one agent would apply for `buffer`, after clipping.
  nn::ParamSet<float> agent_gradient(arena::AgentKind kind, const RolloutBuffer& buffer,
                                     AgentUpdateStats* stats = nullptr) const;

  // Collect/update cycles until the counter reaches ppo.total_updates.
  void run(const std::function<void(const LogRow&)>& on_log = {});

  long update_count() const { return updates_; }
  const TrainerSetup& setup() const { return setup_; }
  const nn::ParamSet<float>& params(arena::AgentKind kind) const { return slot(kind).params; }
  nn::ParamSet<float>& params(arena::AgentKind kind) { return slot(kind).params; }
  const std::vector<arena::EnvState>& envs() const { return envs_; }
  const EpisodeTally& tally() const { return tally_; }
  EpisodeTally take_tally();

 private:
  struct AgentSlot {
    nn::ParamSet<float> params;
    nn::AdamState adam;
    nn::Mat<float> hidden;
    std::vector<int> prev_actions;
    arena::Rng policy_rng;
    double gamma = 0.99;
  };

  AgentSlot& slot(arena::AgentKind kind) { return kind == arena::AgentKind::Predator ? predator_ : prey_; }
  const AgentSlot& slot(arena::AgentKind kind) const {
    return kind == arena::AgentKind::Predator ? predator_ : prey_;
  }
  void reset_env(std::size_t n);
  PpoBatch<float> make_batch(const AgentSlot& agent, const RolloutBuffer& buffer) const;

  TrainerSetup setup_;
  AgentSlot predator_;
  AgentSlot prey_;
  std::vector<arena::EnvState> envs_;
  std::vector<arena::Rng> env_rngs_;
  std::vector<arena::Observation> predator_obs_;
  std::vector<arena::Observation> prey_obs_;
  std::vector<char> episode_start_;
  std::vector<double> predator_return_;
  std::vector<double> prey_return_;
  EpisodeTally tally_;
  long updates_ = 0;
};

// Metadata stored with each checkpoint so evaluation can verify designs.
nlohmann::json describe_agent(arena::AgentKind kind, const AgentDesign& design);
AgentDesign design_from_metadata(const nlohmann::json& metadata);

struct TrainPairResult {
  std::filesystem::path predator_checkpoint;
  std::filesystem::path prey_checkpoint;
  std::filesystem::path log_path;
  std::vector<LogRow> log;
};

// Trains predator and prey jointly for setup.ppo.total_updates updates and
// writes predator.ckpt, prey.ckpt and train_log.csv into `out_dir`.
TrainPairResult train_pair(const TrainerSetup& setup, const std::filesystem::path& out_dir);

}  // namespace predprey::ppo

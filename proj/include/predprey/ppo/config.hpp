#pragma once

#include "predprey/arena/arena.hpp"

namespace predprey::ppo {

struct PPOConfig {
  double clip_eps = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double location_coef = 1.0;
  int rollout_len = 50;
  int n_envs = 64;
  int epochs = 1;
  int minibatches = 1;
  long total_updates = 10'000;
  double learning_rate = 7e-4;
  double max_grad_norm = 0.5;
  bool normalize_advantages = true;
  bool use_gae = false;
  bool clip_value_loss = false;
  int log_interval = 10;

  // Rejects out-of-range values and the disabled PPO variants (GAE, value
  // clipping, several epochs or minibatches).
  void validate() const;
};

// Linear decay from `initial` at update 0 to 0 at update `total`.
double linear_lr(long update, long total, double initial);

// What one side of the pursuit is trained with.
struct AgentDesign {
  arena::AgentSpec spec;
  double gamma = 0.99;
};

}  // namespace predprey::ppo

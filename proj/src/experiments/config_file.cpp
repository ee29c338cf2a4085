#include "predprey/experiments/config_file.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "predprey/nn/checkpoint.hpp"

namespace predprey::experiments {

using nlohmann::json;

json to_json(const arena::ArenaConfig& c) {
  return {{"arena_radius", c.arena_radius},       {"n_obstacles", c.n_obstacles},
          {"obstacle_radius", c.obstacle_radius}, {"agent_radius", c.agent_radius},
          {"dt", c.dt},                           {"turn_rate_coeff", c.turn_rate_coeff},
          {"max_episode_steps", c.max_episode_steps}};
}

arena::ArenaConfig arena_config_from_json(const json& j) {
  arena::ArenaConfig c;
  c.arena_radius = j.value("arena_radius", c.arena_radius);
  c.n_obstacles = j.value("n_obstacles", c.n_obstacles);
  c.obstacle_radius = j.value("obstacle_radius", c.obstacle_radius);
  c.agent_radius = j.value("agent_radius", c.agent_radius);
  c.dt = j.value("dt", c.dt);
  c.turn_rate_coeff = j.value("turn_rate_coeff", c.turn_rate_coeff);
  c.max_episode_steps = j.value("max_episode_steps", c.max_episode_steps);
  return c;
}

json to_json(const ppo::PPOConfig& c) {
  return {{"clip_eps", c.clip_eps},
          {"value_coef", c.value_coef},
          {"entropy_coef", c.entropy_coef},
          {"location_coef", c.location_coef},
          {"rollout_len", c.rollout_len},
          {"n_envs", c.n_envs},
          {"epochs", c.epochs},
          {"minibatches", c.minibatches},
          {"total_updates", c.total_updates},
          {"learning_rate", c.learning_rate},
          {"max_grad_norm", c.max_grad_norm},
          {"normalize_advantages", c.normalize_advantages},
          {"use_gae", c.use_gae},
          {"clip_value_loss", c.clip_value_loss},
          {"log_interval", c.log_interval}};
}

ppo::PPOConfig ppo_config_from_json(const json& j) {
  ppo::PPOConfig c;
  c.clip_eps = j.value("clip_eps", c.clip_eps);
  c.value_coef = j.value("value_coef", c.value_coef);
  c.entropy_coef = j.value("entropy_coef", c.entropy_coef);
  c.location_coef = j.value("location_coef", c.location_coef);
  c.rollout_len = j.value("rollout_len", c.rollout_len);
  c.n_envs = j.value("n_envs", c.n_envs);
  c.epochs = j.value("epochs", c.epochs);
  c.minibatches = j.value("minibatches", c.minibatches);
  c.total_updates = j.value("total_updates", c.total_updates);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.max_grad_norm = j.value("max_grad_norm", c.max_grad_norm);
  c.normalize_advantages = j.value("normalize_advantages", c.normalize_advantages);
  c.use_gae = j.value("use_gae", c.use_gae);
  c.clip_value_loss = j.value("clip_value_loss", c.clip_value_loss);
  c.log_interval = j.value("log_interval", c.log_interval);
  return c;
}

namespace {

json vision_json(arena::VisionArea v) { return v.is_unbounded() ? json(nullptr) : json(v.area()); }

arena::VisionArea vision_from(const json& j) {
  if (j.is_null()) return arena::VisionArea::unbounded();
  if (j.is_string() && (j == "inf" || j == "unbounded")) return arena::VisionArea::unbounded();
  return arena::VisionArea::of(j.get<double>());
}

}  // namespace

void ExperimentConfig::validate() const {
  arena.validate();
  net.validate();
  ppo.validate();
  if (net.obs_dim != arena.observation_dim()) throw std::invalid_argument("net.obs_dim must equal 6 + 2 * n_obstacles");
  if (speeds.empty() || visions.empty() || gammas.empty()) throw std::invalid_argument("grid axes must be non-empty");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (eval_steps < 1) throw std::invalid_argument("eval_steps must be positive");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
}

json to_json(const ExperimentConfig& c) {
  json visions = json::array();
  for (const auto& v : c.visions) visions.push_back(vision_json(v));
  return {
      {"arena", to_json(c.arena)},
      {"net", nn::to_json(c.net)},
      {"ppo", to_json(c.ppo)},
      {"prey", {{"speed", c.prey.spec.speed}, {"vision_area", vision_json(c.prey.spec.vision)}, {"gamma", c.prey.gamma}}},
      {"grid", {{"speeds", c.speeds}, {"vision_areas", visions}, {"gammas", c.gammas}}},
      {"evaluation",
       {{"steps", c.eval_steps},
        {"seed", c.eval_seed},
        {"mode", c.eval_mode == PolicyMode::Greedy ? "greedy" : "sampled"}}},
      {"seeds", c.seeds},
      {"workers", c.workers},
      {"aggregate", c.aggregate == Aggregate::Mean ? "mean" : "median"},
      {"out_dir", c.out_dir},
  };
}

namespace {

// Rejects keys that the defaults do not have, so a misspelt option is not
// silently ignored.
void check_known_keys(const json& given, const json& known, const std::string& where) {
  if (!given.is_object() || !known.is_object()) return;
  for (const auto& [key, value] : given.items()) {
    const auto it = known.find(key);
    if (it == known.end()) throw std::invalid_argument("unknown config key '" + where + key + "'");
    check_known_keys(value, *it, where + key + ".");
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  check_known_keys(j, to_json(ExperimentConfig{}), "");
  ExperimentConfig c;
  if (j.contains("arena")) c.arena = arena_config_from_json(j.at("arena"));
  if (j.contains("net")) c.net = nn::net_config_from_json(j.at("net"));
  if (!j.contains("net") || !j.at("net").contains("obs_dim")) c.net.obs_dim = c.arena.observation_dim();
  if (j.contains("ppo")) c.ppo = ppo_config_from_json(j.at("ppo"));
  if (j.contains("prey")) {
    const json& p = j.at("prey");
    c.prey.spec.speed = p.value("speed", c.prey.spec.speed);
    if (p.contains("vision_area")) c.prey.spec.vision = vision_from(p.at("vision_area"));
    c.prey.gamma = p.value("gamma", c.prey.gamma);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (g.contains("speeds")) c.speeds = g.at("speeds").get<std::vector<double>>();
    if (g.contains("gammas")) c.gammas = g.at("gammas").get<std::vector<double>>();
    if (g.contains("vision_areas")) {
      c.visions.clear();
      for (const json& v : g.at("vision_areas")) c.visions.push_back(vision_from(v));
    }
  }
  if (j.contains("evaluation")) {
    const json& e = j.at("evaluation");
    c.eval_steps = e.value("steps", c.eval_steps);
    c.eval_seed = e.value("seed", c.eval_seed);
    const std::string mode = e.value("mode", std::string("sampled"));
    if (mode != "sampled" && mode != "greedy") throw std::invalid_argument("evaluation.mode must be sampled or greedy");
    c.eval_mode = mode == "greedy" ? PolicyMode::Greedy : PolicyMode::Sampled;
  }
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.workers = j.value("workers", c.workers);
  const std::string agg = j.value("aggregate", std::string("median"));
  if (agg != "median" && agg != "mean") throw std::invalid_argument("aggregate must be median or mean");
  c.aggregate = agg == "mean" ? Aggregate::Mean : Aggregate::Median;
  c.out_dir = j.value("out_dir", c.out_dir);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return experiment_config_from_json(j);
  } catch (const std::exception& e) {
    throw std::runtime_error("config " + path.string() + ": " + e.what());
  }
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string run_hash(const ExperimentConfig& config, const DesignPoint& design, std::uint64_t seed) {
  json key = to_json(config);
  // Execution-only settings do not change what a run computes.
  key.erase("workers");
  key.erase("out_dir");
  key.erase("seeds");
  key.erase("grid");
  key.erase("aggregate");
  key["design"] = {{"speed", design.speed}, {"vision_area", vision_json(design.vision)}, {"gamma", design.gamma}};
  key["seed"] = seed;
  return fnv1a_hex(key.dump());
}

}  // namespace predprey::experiments

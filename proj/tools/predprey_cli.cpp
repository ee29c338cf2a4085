#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "predprey/arena/trace.hpp"
#include "predprey/experiments/config_file.hpp"
#include "predprey/experiments/cross_eval.hpp"
#include "predprey/experiments/energy.hpp"
#include "predprey/experiments/evaluate.hpp"
#include "predprey/experiments/sweep.hpp"
#include "predprey/ppo/trainer.hpp"

namespace fs = std::filesystem;
using namespace predprey;

namespace {

arena::VisionArea parse_vision(const std::string& text) {
  if (text == "inf" || text == "unbounded" || text == "long") return arena::VisionArea::unbounded();
  if (text == "short") return experiments::grid_vision(0);
  if (text == "medium") return experiments::grid_vision(1);
  return arena::VisionArea::of(std::stod(text));
}

experiments::ExperimentConfig base_config(const std::string& path) {
  return path.empty() ? experiments::ExperimentConfig{} : experiments::load_experiment_config(path);
}

experiments::PolicyMode parse_mode(const std::string& mode) {
  if (mode == "sampled") return experiments::PolicyMode::Sampled;
  if (mode == "greedy") return experiments::PolicyMode::Greedy;
  throw std::invalid_argument("unknown policy mode '" + mode + "'");
}

experiments::EvaluationOptions eval_options(const experiments::ExperimentConfig& cfg, long steps,
                                            std::uint64_t seed, const std::string& mode) {
  experiments::EvaluationOptions opts;
  opts.arena = cfg.arena;
  opts.eval_steps = steps;
  opts.seed = seed;
  opts.mode = parse_mode(mode);
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predator-prey co-evolution experiments"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON experiment config providing arena/net/ppo settings");

  // train
  auto* train = app.add_subcommand("train", "Train one predator/prey pair");
  double speed = experiments::kAverageSpeed;
  std::string vision = "inf";
  double gamma = 0.99;
  std::uint64_t seed = 0;
  long updates = -1;
  int width = -1;
  int envs = -1;
  std::string out = "run";
  train->add_option("--speed", speed, "Predator speed")->capture_default_str();
  train->add_option("--vision", vision, "Predator vision area, or inf/short/medium/long")->capture_default_str();
  train->add_option("--gamma", gamma, "Predator discount factor")->capture_default_str();
  train->add_option("--seed", seed)->capture_default_str();
  train->add_option("--updates", updates, "PPO updates (default from config)");
  train->add_option("--width", width, "GRU/MLP hidden width (default from config)");
  train->add_option("--envs", envs, "Parallel environments (default from config)");
  train->add_option("--out", out, "Output directory")->capture_default_str();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Count captures over a fixed step budget");
  std::string predator_path;
  std::string prey_path;
  std::string eval_vision;
  long steps = experiments::kEvalSteps;
  std::string mode = "sampled";
  eval->add_option("--predator", predator_path)->required();
  eval->add_option("--prey", prey_path)->required();
  eval->add_option("--vision", eval_vision, "Override the predator's vision at evaluation time");
  eval->add_option("--steps", steps)->capture_default_str();
  eval->add_option("--seed", seed)->capture_default_str();
  eval->add_option("--mode", mode, "sampled or greedy")->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Train and evaluate every design in the grid");
  int workers = -1;
  std::string sweep_out;
  sweep->add_option("--workers", workers, "Parallel runs (default from config)");
  sweep->add_option("--out", sweep_out, "Output directory (default from config)");

  // energy
  auto* energy = app.add_subcommand("energy", "Net energy gain tables from sweep results");
  std::string results_path;
  std::string cv = "0";
  std::string cp = "0";
  std::string energy_out;
  energy->add_option("--results", results_path, "sweep_results.csv")->required();
  energy->add_option("--cv", cv, "Vision cost: 0, sigma or 2sigma")->capture_default_str();
  energy->add_option("--cp", cp, "Planning cost: 0, sigma or 2sigma")->capture_default_str();
  energy->add_option("--speed", speed, "Speed slice")->capture_default_str();
  energy->add_option("--out", energy_out, "Write the table as CSV");

  // cross-eval
  auto* cross = app.add_subcommand("cross-eval", "Evaluate long-vision predators at reduced vision");
  std::vector<std::string> predators;
  std::vector<std::string> prey_long;
  std::vector<std::string> prey_short;
  std::string cross_vision = "0.3";
  std::string cross_out;
  cross->add_option("--predator", predators, "Predator checkpoints trained with unbounded vision")->required();
  cross->add_option("--prey-long", prey_long, "Prey co-trained with each long-vision predator")->required();
  cross->add_option("--prey-short", prey_short, "Prey co-trained with a short-vision predator")->required();
  cross->add_option("--vision", cross_vision, "Evaluation vision area")->capture_default_str();
  cross->add_option("--steps", steps)->capture_default_str();
  cross->add_option("--seed", seed)->capture_default_str();
  cross->add_option("--mode", mode)->capture_default_str();
  cross->add_option("--out", cross_out, "Write rows as CSV");

  // trace
  auto* trace = app.add_subcommand("trace", "Write per-step trajectory records (JSON lines)");
  int episodes = 1;
  std::string trace_out = "trace.jsonl";
  trace->add_option("--predator", predator_path)->required();
  trace->add_option("--prey", prey_path)->required();
  trace->add_option("--episodes", episodes)->capture_default_str();
  trace->add_option("--out", trace_out)->capture_default_str();
  trace->add_option("--vision", eval_vision, "Override the predator's vision");
  trace->add_option("--seed", seed)->capture_default_str();
  trace->add_option("--mode", mode)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    experiments::ExperimentConfig cfg = base_config(config_path);

    if (*train) {
      ppo::TrainerSetup setup;
      setup.arena = cfg.arena;
      setup.net = cfg.net;
      setup.ppo = cfg.ppo;
      if (updates > 0) setup.ppo.total_updates = updates;
      if (width > 0) setup.net.hidden_width = width;
      if (envs > 0) setup.ppo.n_envs = envs;
      setup.predator = {{speed, parse_vision(vision)}, gamma};
      setup.prey = cfg.prey;
      setup.seed = seed;
      const ppo::TrainPairResult r = ppo::train_pair(setup, out);
      std::cout << "predator: " << r.predator_checkpoint.string() << "\nprey: " << r.prey_checkpoint.string()
                << "\nlog: " << r.log_path.string() << '\n';
      if (!r.log.empty()) {
        std::cout << "final captures/episode: " << r.log.back().captures_per_episode << '\n';
      }
      return 0;
    }

    if (*eval) {
      const nn::Checkpoint predator = nn::load_checkpoint(predator_path);
      const nn::Checkpoint prey = nn::load_checkpoint(prey_path);
      const experiments::DesignPoint design = experiments::design_from_checkpoint(predator);
      const arena::VisionArea v = eval_vision.empty() ? design.vision : parse_vision(eval_vision);
      const auto r = experiments::evaluate_with_vision(predator, prey, design, v, eval_options(cfg, steps, seed, mode));
      std::cout << "design " << design.label() << "\nsteps " << r.steps << "\ncaptures " << r.captures
                << "\ntruncations " << r.truncations << "\nepisodes " << r.episodes << '\n';
      return 0;
    }

    if (*sweep) {
      if (workers > 0) cfg.workers = workers;
      const fs::path dir = sweep_out.empty() ? fs::path(cfg.out_dir) : fs::path(sweep_out);
      const auto result = experiments::run_sweep(cfg.grid(), cfg, dir, [](const std::string& msg) {
        std::cout << msg << std::endl;
      });
      long failed = 0;
      for (const auto& row : result.rows) failed += std::isnan(row.captures) ? 1 : 0;
      std::cout << "wrote " << (dir / "sweep_results.csv").string() << " (" << result.rows.size() << " designs, "
                << failed << " without a successful run)\n";
      return failed == 0 ? 0 : 2;
    }

    if (*energy) {
      const experiments::SweepResult result = experiments::read_sweep_csv(results_path);
      const double sigma = experiments::compute_sigma(result);
      const experiments::EnergyCosts costs{experiments::cost_multiplier(cv) * sigma,
                                           experiments::cost_multiplier(cp) * sigma};
      const experiments::NetEnergy table = experiments::net_energy(result, costs, speed);
      std::cout << "sigma " << sigma << "  cv " << costs.vision_cost << "  cp " << costs.planning_cost << '\n';
      std::cout << "vision\\planning";
      for (int p = 0; p < experiments::kLevels; ++p) std::cout << '\t' << experiments::planning_name(p);
      std::cout << '\n';
      for (int v = 0; v < experiments::kLevels; ++v) {
        std::cout << experiments::vision_name(v);
        for (int p = 0; p < experiments::kLevels; ++p) {
          std::cout << '\t' << table.net[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)];
          if (v == table.best_vision && p == table.best_planning) std::cout << '*';
        }
        std::cout << '\n';
      }
      std::cout << "optimal: vision " << experiments::vision_name(table.best_vision) << ", planning "
                << experiments::planning_name(table.best_planning) << '\n';
      if (!energy_out.empty()) experiments::write_energy_csv(energy_out, {table});
      return 0;
    }

    if (*cross) {
      if (predators.size() != prey_long.size() || predators.size() != prey_short.size()) {
        throw std::invalid_argument("--predator, --prey-long and --prey-short need the same number of values");
      }
      std::vector<experiments::CrossEvalEntry> entries;
      for (std::size_t i = 0; i < predators.size(); ++i) {
        entries.push_back({nn::load_checkpoint(predators[i]), nn::load_checkpoint(prey_long[i]),
                           nn::load_checkpoint(prey_short[i])});
      }
      const auto rows =
          experiments::cross_evaluate(entries, parse_vision(cross_vision), eval_options(cfg, steps, seed, mode));
      for (const auto& row : rows) {
        std::cout << row.design.label() << '\t' << row.prey_variant << '\t' << row.captures << '\n';
      }
      if (!cross_out.empty()) experiments::write_cross_eval_csv(cross_out, rows);
      return 0;
    }

    if (*trace) {
      const nn::Checkpoint predator = nn::load_checkpoint(predator_path);
      const nn::Checkpoint prey = nn::load_checkpoint(prey_path);
      const experiments::DesignPoint design = experiments::design_from_checkpoint(predator);
      const arena::VisionArea v = eval_vision.empty() ? design.vision : parse_vision(eval_vision);
      std::ofstream file(trace_out);
      if (!file) throw std::runtime_error("cannot open " + trace_out);
      arena::TraceWriter writer(file);
      // Stop at the first step of episode `episodes`, which we never write.
      const long budget = static_cast<long>(cfg.arena.max_episode_steps) * episodes;
      experiments::EvaluationHooks hooks;
      hooks.on_episode = [&](int ep, const arena::EnvState& env) {
        if (ep < episodes) writer.begin_episode(ep, env);
      };
      hooks.on_step = [&](int ep, const arena::EnvState& after, arena::Action a, arena::Action b,
                          const arena::StepResult& r) {
        if (ep < episodes) writer.record_step(ep, after, a, b, r);
      };
      experiments::evaluate_with_vision(predator, prey, design, v, eval_options(cfg, budget, seed, mode), &hooks);
      std::cout << "wrote " << trace_out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "predprey/experiments/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "predprey/experiments/evaluate.hpp"
#include "predprey/ppo/trainer.hpp"

namespace predprey::experiments {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLedgerHeader =
    "hash,speed,vision_area,gamma,vision_level,planning_level,seed,status,captures,manifest,error";

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string sanitize(std::string text) {
  std::replace_if(text.begin(), text.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return text;
}

std::string ledger_line(const RunRecord& r) {
  const DesignPoint& d = r.design;
  std::ostringstream os;
  os << r.hash << ',' << format_number(d.speed) << ','
     << (d.vision.is_unbounded() ? std::string("inf") : format_number(d.vision.area())) << ','
     << format_number(d.gamma) << ',' << d.vision_level << ',' << d.planning_level << ',' << r.seed << ','
     << (r.ok ? "ok" : "failed") << ',' << r.captures << ',' << sanitize(r.manifest) << ',' << sanitize(r.error);
  return os.str();
}

nlohmann::json design_json(const DesignPoint& d) {
  return {{"speed", d.speed},
          {"vision_area", d.vision.is_unbounded() ? nlohmann::json(nullptr) : nlohmann::json(d.vision.area())},
          {"gamma", d.gamma},
          {"vision_level", d.vision_level},
          {"planning_level", d.planning_level}};
}

}  // namespace

std::vector<RunRecord> read_run_ledger(const fs::path& path) {
  std::vector<RunRecord> records;
  std::ifstream in(path);
  if (!in) return records;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    while (f.size() < 11) f.emplace_back();
    try {
      RunRecord r;
      r.hash = f[0];
      const arena::VisionArea vision =
          f[2] == "inf" ? arena::VisionArea::unbounded() : arena::VisionArea::of(std::stod(f[2]));
      // Read back verbatim: a failed run may hold values custom() rejects.
      r.design = {std::stod(f[1]), vision, std::stod(f[3]), std::stoi(f[4]), std::stoi(f[5])};
      r.seed = std::stoull(f[6]);
      r.ok = f[7] == "ok";
      r.captures = std::stol(f[8]);
      r.manifest = f[9];
      r.error = f[10];
      records.push_back(std::move(r));
    } catch (const std::exception&) {
      // A torn final line from an interrupted sweep; that run is redone.
    }
  }
  return records;
}

RunRecord execute_run(const ExperimentConfig& config, const DesignPoint& design, std::uint64_t seed,
                      const fs::path& out_dir) {
  RunRecord record;
  record.hash = run_hash(config, design, seed);
  record.design = design;
  record.seed = seed;
  const fs::path run_dir = out_dir / "runs" / record.hash;
  fs::create_directories(run_dir);
  record.manifest = (run_dir / "manifest.json").string();

  nlohmann::json manifest = {
      {"run_id", record.hash},
      {"design", design_json(design)},
      {"seed", seed},
      {"config", to_json(config)},
      {"started_at", timestamp()},
  };

  try {
    ppo::TrainerSetup setup;
    setup.arena = config.arena;
    setup.net = config.net;
    setup.ppo = config.ppo;
    setup.predator = design.agent();
    setup.prey = config.prey;
    setup.seed = seed;
    const ppo::TrainPairResult trained = ppo::train_pair(setup, run_dir);
    manifest["checkpoints"] = {{"predator", trained.predator_checkpoint.string()},
                               {"prey", trained.prey_checkpoint.string()}};
    manifest["training_log"] = trained.log_path.string();

    EvaluationOptions opts;
    opts.eval_steps = config.eval_steps;
    opts.seed = config.eval_seed;
    opts.arena = config.arena;
    opts.mode = config.eval_mode;
    const EvaluationResult eval = evaluate(nn::load_checkpoint(trained.predator_checkpoint),
                                           nn::load_checkpoint(trained.prey_checkpoint), design, opts);
    record.ok = true;
    record.captures = eval.captures;
    manifest["evaluation"] = {{"steps", eval.steps},
                              {"captures", eval.captures},
                              {"truncations", eval.truncations},
                              {"episodes", eval.episodes},
                              {"seed", opts.seed}};
    manifest["status"] = "ok";
  } catch (const std::exception& e) {
    record.ok = false;
    record.error = e.what();
    manifest["status"] = "failed";
    manifest["error"] = e.what();
  }
  manifest["finished_at"] = timestamp();
  std::ofstream(run_dir / "manifest.json", std::ios::trunc) << manifest.dump(2) << '\n';
  return record;
}

double aggregate(std::vector<double> values, Aggregate how) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (how == Aggregate::Mean) return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

SweepResult run_sweep(const std::vector<DesignPoint>& grid, const ExperimentConfig& config, const fs::path& out_dir,
                      const ProgressFn& progress) {
  if (grid.empty()) throw std::invalid_argument("run_sweep: empty design grid");
  config.validate();
  fs::create_directories(out_dir);
  const fs::path ledger_path = out_dir / "runs.csv";

  std::map<std::string, RunRecord> completed;
  for (RunRecord& r : read_run_ledger(ledger_path)) {
    if (r.ok) completed[r.hash] = std::move(r);
  }

  struct Job {
    std::size_t design_index;
    std::uint64_t seed;
    std::string hash;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::uint64_t seed : config.seeds) {
      std::string hash = run_hash(config, grid[i], seed);
      if (completed.count(hash) != 0U) {
        if (progress) progress("skip " + grid[i].label() + " seed " + std::to_string(seed) + " (already done)");
        continue;
      }
      jobs.push_back({i, seed, std::move(hash)});
    }
  }

  std::mutex mutex;
  {
    std::ifstream probe(ledger_path);
    if (!probe || probe.peek() == std::char_traits<char>::eof()) {
      std::ofstream(ledger_path, std::ios::trunc) << kLedgerHeader << '\n';
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& job = jobs[k];
      const DesignPoint& design = grid[job.design_index];
      if (progress) {
        std::lock_guard lock(mutex);
        progress("run " + design.label() + " seed " + std::to_string(job.seed));
      }
      RunRecord record = execute_run(config, design, job.seed, out_dir);
      std::lock_guard lock(mutex);
      std::ofstream(ledger_path, std::ios::app) << ledger_line(record) << '\n';
      if (progress) {
        progress((record.ok ? "done " : "FAILED ") + design.label() + " seed " + std::to_string(job.seed) +
                 (record.ok ? ": " + std::to_string(record.captures) + " captures" : ": " + record.error));
      }
      if (record.ok) completed[record.hash] = std::move(record);
    }
  };

  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  SweepResult result;
  result.metadata.seeds = config.seeds;
  result.metadata.updates = config.ppo.total_updates;
  result.metadata.config_hash = fnv1a_hex(to_json(config).dump());
  for (const DesignPoint& design : grid) {
    std::vector<double> captures;
    for (std::uint64_t seed : config.seeds) {
      auto it = completed.find(run_hash(config, design, seed));
      if (it != completed.end()) captures.push_back(static_cast<double>(it->second.captures));
    }
    SweepRow row;
    row.design = design;
    row.captures = aggregate(captures, config.aggregate);
    row.seeds = static_cast<int>(captures.size());
    row.updates = config.ppo.total_updates;
    result.rows.push_back(row);
  }
  write_sweep_csv(out_dir / "sweep_results.csv", result);
  nlohmann::json meta = {{"seeds", result.metadata.seeds},
                         {"updates", result.metadata.updates},
                         {"config_hash", result.metadata.config_hash},
                         {"config", to_json(config)}};
  std::ofstream(out_dir / "sweep_meta.json", std::ios::trunc) << meta.dump(2) << '\n';
  return result;
}

}  // namespace predprey::experiments

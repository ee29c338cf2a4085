#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "predprey/experiments/results.hpp"

namespace predprey::experiments {

namespace fs = std::filesystem;

const SweepRow& SweepResult::at(const DesignPoint& design) const {
  for (const SweepRow& r : rows) {
    if (r.design == design) return r;
  }
  throw std::out_of_range("design " + design.label() + " not in sweep result");
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kDesignColumns = "speed,vision_area,gamma,vision_level,planning_level";
const std::string kSweepHeader = std::string(kDesignColumns) + ",captures,seeds,K";
const std::string kEnergyHeader = kSweepHeader + ",cv,cp,net,is_optimal";
const std::string kCrossHeader = std::string(kDesignColumns) + ",prey_variant,eval_vision_area,captures,steps,seed";

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory for " + path.string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string vision_text(arena::VisionArea v) { return v.is_unbounded() ? "inf" : format_number(v.area()); }

std::string design_fields(const DesignPoint& d) {
  return format_number(d.speed) + ',' + vision_text(d.vision) + ',' + format_number(d.gamma) + ',' +
         std::to_string(d.vision_level) + ',' + std::to_string(d.planning_level);
}

struct CsvReader {
  fs::path path;
  std::ifstream in;
  int line_no = 0;

  CsvReader(const fs::path& p, const std::string& header) : path(p), in(p) {
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string first;
    if (!std::getline(in, first)) throw std::runtime_error(path.string() + ": missing header row");
    ++line_no;
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (first != header) throw std::runtime_error(path.string() + ": unexpected header '" + first + "'");
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      fields.clear();
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) fields.push_back(cell);
      if (!line.empty() && line.back() == ',') fields.emplace_back();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
  }

  double number(const std::string& cell, const char* column) const {
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
      fail(std::string("column ") + column + ": '" + cell + "' is not a number");
    return v;
  }

  long integer(const std::string& cell, const char* column) const {
    long v = 0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
      fail(std::string("column ") + column + ": '" + cell + "' is not an integer");
    return v;
  }

  arena::VisionArea vision(const std::string& cell, const char* column) const {
    const double v = number(cell, column);
    try {
      return arena::VisionArea::of(v);
    } catch (const std::invalid_argument& e) {
      fail(std::string("column ") + column + ": " + e.what());
    }
  }

  DesignPoint design(const std::vector<std::string>& f) const {
    try {
      return DesignPoint::custom(number(f[0], "speed"), vision(f[1], "vision_area"), number(f[2], "gamma"),
                                 static_cast<int>(integer(f[3], "vision_level")),
                                 static_cast<int>(integer(f[4], "planning_level")));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
};

}  // namespace

void write_sweep_csv(const fs::path& path, const SweepResult& result) {
  std::ofstream out = open_out(path);
  out << kSweepHeader << '\n';
  for (const SweepRow& r : result.rows) {
    out << design_fields(r.design) << ',' << format_number(r.captures) << ',' << r.seeds << ',' << r.updates << '\n';
  }
  finish(out, path);
}

SweepResult read_sweep_csv(const fs::path& path) {
  CsvReader reader(path, kSweepHeader);
  SweepResult result;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 8) reader.fail("expected 8 columns, found " + std::to_string(f.size()));
    SweepRow row;
    row.design = reader.design(f);
    row.captures = reader.number(f[5], "captures");
    row.seeds = static_cast<int>(reader.integer(f[6], "seeds"));
    row.updates = reader.integer(f[7], "K");
    result.rows.push_back(row);
  }
  return result;
}

void write_energy_csv(const fs::path& path, const std::vector<NetEnergy>& tables) {
  std::ofstream out = open_out(path);
  out << kEnergyHeader << '\n';
  for (const NetEnergy& e : tables) {
    for (int v = 0; v < kLevels; ++v) {
      for (int p = 0; p < kLevels; ++p) {
        const SweepRow& r = e.cells[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)];
        const bool optimal = v == e.best_vision && p == e.best_planning;
        out << design_fields(r.design) << ',' << format_number(r.captures) << ',' << r.seeds << ',' << r.updates << ','
            << format_number(e.costs.vision_cost) << ',' << format_number(e.costs.planning_cost) << ','
            << format_number(e.net[static_cast<std::size_t>(v)][static_cast<std::size_t>(p)]) << ','
            << (optimal ? 1 : 0) << '\n';
      }
    }
  }
  finish(out, path);
}

void write_cross_eval_csv(const fs::path& path, const std::vector<CrossEvalRow>& rows) {
  std::ofstream out = open_out(path);
  out << kCrossHeader << '\n';
  for (const CrossEvalRow& r : rows) {
    out << design_fields(r.design) << ',' << r.prey_variant << ',' << vision_text(r.eval_vision) << ',' << r.captures
        << ',' << r.steps << ',' << r.seed << '\n';
  }
  finish(out, path);
}

std::vector<CrossEvalRow> read_cross_eval_csv(const fs::path& path) {
  CsvReader reader(path, kCrossHeader);
  std::vector<CrossEvalRow> rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 10) reader.fail("expected 10 columns, found " + std::to_string(f.size()));
    CrossEvalRow row;
    row.design = reader.design(f);
    row.prey_variant = f[5];
    row.eval_vision = reader.vision(f[6], "eval_vision_area");
    row.captures = reader.integer(f[7], "captures");
    row.steps = reader.integer(f[8], "steps");
    row.seed = static_cast<std::uint64_t>(reader.integer(f[9], "seed"));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace predprey::experiments

#include "orbitsched/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "orbitsched/io.hpp"
#include "orbitsched/validate.hpp"

namespace orbitsched {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ResourceMode mode) { return mode == ResourceMode::kWith ? "with" : "without"; }

ResourceMode resource_mode_from_string(std::string_view name) {
  if (name == "with") return ResourceMode::kWith;
  if (name == "without") return ResourceMode::kWithout;
  throw std::invalid_argument("unknown resource mode '" + std::string(name) + "' (expected with or without)");
}

void ExperimentSpec::check() const {
  if (location_counts.empty()) throw std::invalid_argument("location_counts: must not be empty");
  for (std::size_t c : location_counts) {
    if (c == 0) throw std::invalid_argument("location_counts: counts must be at least 1");
  }
  if (samples_per_count < 1) throw std::invalid_argument("samples_per_count: must be at least 1");
  if (solvers.empty()) throw std::invalid_argument("solvers: must not be empty");
  for (const auto& s : solvers) {
    if (!is_solver(s.name)) throw std::invalid_argument("solvers: unknown solver '" + s.name + "'");
    const auto& known = solver_parameters(s.name);
    for (const auto& [key, value] : s.params) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw std::invalid_argument("solvers: parameter '" + key + "' is not used by solver '" + s.name + "'");
      }
    }
  }
  if (resource_modes.empty()) throw std::invalid_argument("resource_modes: must not be empty");
  if (!(horizon_s > 0.0)) throw std::invalid_argument("horizon_s: must be positive");
}

namespace {

template <typename T>
T field(const json& doc, const char* key) {
  const std::string path = std::string("/") + key;
  if (!doc.contains(key)) throw FormatError(path + ": missing required field", path);
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(path + ": wrong type", path);
  }
}

}  // namespace

ExperimentSpec experiment_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError(": expected a JSON object at top level");
  ExperimentSpec spec;
  spec.location_counts = field<std::vector<std::size_t>>(doc, "location_counts");
  if (doc.contains("samples_per_count")) spec.samples_per_count = field<std::size_t>(doc, "samples_per_count");
  if (doc.contains("base_seed")) spec.base_seed = field<std::uint64_t>(doc, "base_seed");
  if (doc.contains("horizon_s")) spec.horizon_s = field<double>(doc, "horizon_s");
  if (doc.contains("resource_modes")) {
    spec.resource_modes.clear();
    const auto names = field<std::vector<std::string>>(doc, "resource_modes");
    for (std::size_t i = 0; i < names.size(); ++i) {
      try {
        spec.resource_modes.push_back(resource_mode_from_string(names[i]));
      } catch (const std::invalid_argument& e) {
        const std::string path = "/resource_modes/" + std::to_string(i);
        throw FormatError(path + ": " + e.what(), path);
      }
    }
  }
  if (!doc.contains("solvers") || !doc.at("solvers").is_array()) {
    throw FormatError("/solvers: expected an array of solver entries", "/solvers");
  }
  const json& solvers = doc.at("solvers");
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    const std::string path = "/solvers/" + std::to_string(i);
    const json& entry = solvers[i];
    SolverEntry s;
    if (entry.is_string()) {
      s.name = entry.get<std::string>();
    } else if (entry.is_object() && entry.contains("name") && entry.at("name").is_string()) {
      s.name = entry.at("name").get<std::string>();
      if (entry.contains("label")) s.label = entry.at("label").get<std::string>();
      if (entry.contains("params")) {
        if (!entry.at("params").is_object()) throw FormatError(path + "/params: expected an object", path + "/params");
        for (const auto& [key, value] : entry.at("params").items()) {
          if (!value.is_number() && !value.is_boolean()) {
            throw FormatError(path + "/params/" + key + ": expected a number", path + "/params/" + key);
          }
          s.params[key] = value.is_boolean() ? (value.get<bool>() ? 1.0 : 0.0) : value.get<double>();
        }
      }
    } else {
      throw FormatError(path + ": expected a solver name or an object with a name", path);
    }
    if (s.label.empty()) s.label = s.name;
    spec.solvers.push_back(std::move(s));
  }
  try {
    spec.check();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const std::string key = what.substr(0, what.find(':'));
    throw FormatError("/" + what, "/" + key);
  }
  return spec;
}

ordered_json experiment_to_json(const ExperimentSpec& spec) {
  ordered_json doc;
  doc["location_counts"] = spec.location_counts;
  doc["samples_per_count"] = spec.samples_per_count;
  auto& solvers = doc["solvers"] = ordered_json::array();
  for (const auto& s : spec.solvers) {
    solvers.push_back({{"name", s.name}, {"label", s.label}, {"params", s.params}});
  }
  auto& modes = doc["resource_modes"] = ordered_json::array();
  for (auto m : spec.resource_modes) modes.push_back(std::string(to_string(m)));
  doc["base_seed"] = spec.base_seed;
  doc["horizon_s"] = spec.horizon_s;
  return doc;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Runs f(i) for i in [0, n) on `jobs` threads.
template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

SolverParams params_for(const SolverEntry& entry, ResourceMode mode, std::uint64_t seed) {
  SolverParams p;
  p.seed = seed;
  for (const auto& [key, value] : entry.params) p.set(key, value);
  p.smdp.resources_enabled = mode == ResourceMode::kWith;
  return p;
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t count, std::size_t sample) {
  return base_seed + splitmix64((static_cast<std::uint64_t>(count) << 32) ^ static_cast<std::uint64_t>(sample));
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, unsigned jobs) {
  spec.check();
  struct Cell {
    std::size_t count;
    std::size_t sample;
    std::uint64_t seed;
    Scenario scenario;
  };
  std::vector<Cell> cells;
  for (std::size_t count : spec.location_counts) {
    for (std::size_t s = 0; s < spec.samples_per_count; ++s) {
      cells.push_back({count, s, cell_seed(spec.base_seed, count, s), {}});
    }
  }
  // Opportunities are computed once per cell and shared read-only by every run in it.
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    cells[i].scenario = with_opportunities(make_scenario(cells[i].count, cells[i].seed, spec.horizon_s));
  });

  struct Task {
    std::size_t cell;
    ResourceMode mode;
    std::size_t solver;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (auto mode : spec.resource_modes) {
      for (std::size_t k = 0; k < spec.solvers.size(); ++k) {
        if (mode == ResourceMode::kWith && !supports_resources(spec.solvers[k].name)) continue;
        tasks.push_back({c, mode, k});
      }
    }
  }

  std::vector<ResultRow> rows(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    const Cell& cell = cells[task.cell];
    const SolverEntry& entry = spec.solvers[task.solver];
    ResultRow& row = rows[i];
    row.solver = entry.label;
    row.resource_mode = task.mode;
    row.n_locations = cell.count;
    row.sample_index = cell.sample;
    row.scenario_seed = cell.seed;
    try {
      const SolverParams params = params_for(entry, task.mode, cell.seed);
      const Plan plan = run_solver(entry.name, cell.scenario, params);
      const ValidationReport report = validate(plan, cell.scenario, params.smdp);
      row.total_reward = plan.total_reward;
      row.collect_reward = plan.collect_reward;
      row.images_collected = plan.images_collected;
      row.discounted_return = plan.discounted_return;
      row.runtime_s = plan.wall_time_s;
      row.reward_per_second = plan.wall_time_s > 0.0 ? plan.total_reward / plan.wall_time_s
                                                     : std::numeric_limits<double>::infinity();
      row.feasible = report.feasible;
      row.violations = report.violations.size();
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  // Tasks were generated in canonical order, so rows already are.
  return rows;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "solver,resource_mode,n_locations,sample_index,scenario_seed,total_reward,collect_reward,images_collected,"
        "discounted_return,runtime_s,reward_per_second,feasible,violations,error\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << csv_escape(r.solver) << ',' << to_string(r.resource_mode) << ',' << r.n_locations << ',' << r.sample_index
       << ',' << r.scenario_seed << ',' << r.total_reward << ',' << r.collect_reward << ',' << r.images_collected << ','
       << r.discounted_return << ',' << r.runtime_s << ',' << r.reward_per_second << ','
       << (r.error.empty() ? (r.feasible ? "true" : "false") : "") << ',' << r.violations << ','
       << csv_escape(r.error) << '\n';
  }
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow& s) {
      return s.solver == r.solver && s.resource_mode == r.resource_mode && s.n_locations == r.n_locations;
    });
    if (it == out.end()) {
      out.push_back({r.solver, r.resource_mode, r.n_locations});
      it = out.end() - 1;
    }
    if (!r.error.empty()) {
      ++it->errors;
      continue;
    }
    ++it->runs;
    it->mean_total_reward += r.total_reward;
    it->mean_collect_reward += r.collect_reward;
    it->mean_runtime_s += r.runtime_s;
    it->mean_reward_per_second += r.reward_per_second;
  }
  for (auto& s : out) {
    if (s.runs == 0) continue;
    const auto n = static_cast<double>(s.runs);
    s.mean_total_reward /= n;
    s.mean_collect_reward /= n;
    s.mean_runtime_s /= n;
    s.mean_reward_per_second /= n;
  }
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "solver,resource_mode,n_locations,runs,errors,mean_total_reward,mean_collect_reward,mean_runtime_s,"
        "mean_reward_per_second\n";
  os << std::setprecision(12);
  for (const auto& s : rows) {
    os << csv_escape(s.solver) << ',' << to_string(s.resource_mode) << ',' << s.n_locations << ',' << s.runs << ','
       << s.errors << ',' << s.mean_total_reward << ',' << s.mean_collect_reward << ',' << s.mean_runtime_s << ','
       << s.mean_reward_per_second << '\n';
  }
}

// ---------------------------------------------------------------------------------------------

std::vector<ParamPoint> expand_grid(const ParamGrid& grid) {
  std::vector<ParamPoint> points{{}};
  for (const auto& [name, values] : grid) {
    if (values.empty()) throw std::invalid_argument("grid parameter '" + name + "' has no values");
    std::vector<ParamPoint> next;
    next.reserve(points.size() * values.size());
    for (const auto& p : points) {
      for (double v : values) {
        ParamPoint q = p;
        q[name] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

double metric_of(const GridRow& row, GridMetric metric) {
  switch (metric) {
    case GridMetric::kCollectReward: return row.mean_collect_reward;
    case GridMetric::kDiscountedReturn: return row.mean_discounted_return;
    case GridMetric::kTotalReward: break;
  }
  return row.mean_total_reward;
}

std::vector<GridRow> grid_search(const Scenario& scenario, const std::string& solver, const ParamGrid& grid,
                                 const GridOptions& options) {
  if (!is_solver(solver)) throw std::invalid_argument("unknown solver '" + solver + "'");
  const auto& known = solver_parameters(solver);
  for (const auto& [name, values] : grid) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw std::invalid_argument("parameter '" + name + "' is not used by solver '" + solver + "'");
    }
  }
  const bool stochastic = solver == "mcts" && grid.count("seed") == 0;
  const std::size_t repeats = stochastic ? std::max<std::size_t>(1, options.stochastic_repeats) : 1;

  std::vector<GridRow> rows;
  for (const auto& point : expand_grid(grid)) {
    GridRow row;
    row.params = point;
    std::vector<double> totals;
    for (std::size_t k = 0; k < repeats; ++k) {
      SolverParams params = options.base;
      if (stochastic) params.seed = options.base_seed + k;
      for (const auto& [name, value] : point) params.set(name, value);
      const Plan plan = run_solver(solver, scenario, params);
      totals.push_back(plan.total_reward);
      row.mean_collect_reward += plan.collect_reward;
      row.mean_discounted_return += plan.discounted_return;
      row.mean_runtime_s += plan.wall_time_s;
    }
    const auto n = static_cast<double>(repeats);
    row.runs = repeats;
    for (double t : totals) row.mean_total_reward += t;
    row.mean_total_reward /= n;
    row.mean_collect_reward /= n;
    row.mean_discounted_return /= n;
    row.mean_runtime_s /= n;
    for (double t : totals) row.std_total_reward += (t - row.mean_total_reward) * (t - row.mean_total_reward);
    row.std_total_reward = repeats > 1 ? std::sqrt(row.std_total_reward / (n - 1.0)) : 0.0;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const GridRow& a, const GridRow& b) {
    return metric_of(a, options.metric) > metric_of(b, options.metric);
  });
  return rows;
}

std::vector<GridRow> best_per_n_a_max(const std::vector<GridRow>& ranked) {
  std::map<double, GridRow> best;
  for (const auto& row : ranked) {
    auto it = row.params.find("n_a_max");
    const double key = it == row.params.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
    if (std::isnan(key)) {
      if (best.empty()) best.emplace(0.0, row);
      continue;
    }
    best.emplace(key, row);  // first occurrence is the best ranked
  }
  std::vector<GridRow> out;
  for (auto& [k, row] : best) out.push_back(std::move(row));
  return out;
}

void write_grid_csv(std::ostream& os, const std::vector<GridRow>& rows) {
  std::vector<std::string> names;
  for (const auto& r : rows) {
    for (const auto& [k, v] : r.params) {
      if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
    }
  }
  std::sort(names.begin(), names.end());
  os << "rank";
  for (const auto& n : names) os << ',' << n;
  os << ",runs,mean_total_reward,std_total_reward,mean_collect_reward,mean_discounted_return,mean_runtime_s\n";
  os << std::setprecision(12);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << i + 1;
    for (const auto& n : names) {
      auto it = r.params.find(n);
      os << ',';
      if (it != r.params.end()) os << it->second;
    }
    os << ',' << r.runs << ',' << r.mean_total_reward << ',' << r.std_total_reward << ',' << r.mean_collect_reward
       << ',' << r.mean_discounted_return << ',' << r.mean_runtime_s << '\n';
  }
}

ParamGrid grid_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError(": expected an object mapping parameter names to value arrays");
  ParamGrid grid;
  for (const auto& [key, value] : doc.items()) {
    const std::string path = "/" + key;
    if (!value.is_array() || value.empty()) throw FormatError(path + ": expected a non-empty array of numbers", path);
    for (const auto& v : value) {
      if (!v.is_number()) throw FormatError(path + ": expected a non-empty array of numbers", path);
      grid[key].push_back(v.get<double>());
    }
  }
  if (grid.empty()) throw FormatError(": grid has no parameters");
  return grid;
}

}  // namespace orbitsched

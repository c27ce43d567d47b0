#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "orbitsched/bench.hpp"
#include "orbitsched/chart.hpp"
#include "orbitsched/io.hpp"
#include "orbitsched/scenario.hpp"
#include "orbitsched/solvers.hpp"
#include "orbitsched/validate.hpp"

namespace orbitsched::cli {

namespace {

namespace fs = std::filesystem;

// Bad input that is the caller's fault: exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ORBITSCHED_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("ORBITSCHED_SEED is not an unsigned integer: '") + env + "'");
  }
  return 0;
}

std::string valid_solvers() {
  std::string s;
  for (const auto& n : solver_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("file not found: '" + path + "'");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  return out;
}

Scenario load_with_opportunities(const std::string& path) {
  require_file(path);
  Scenario sc = load_scenario(path);
  if (!sc.has_opportunities()) sc = with_opportunities(std::move(sc));
  return sc;
}

struct GenArgs {
  std::size_t locations = 0;
  std::uint64_t seed = 0;
  double horizon_s = 86400.0;
  std::string out;
  std::string stations;
};

int cmd_gen(const GenArgs& a, bool seed_given, std::ostream& out) {
  if (a.locations == 0) throw UsageError("--locations must be at least 1");
  if (!(a.horizon_s > 0.0)) throw UsageError("--horizon-s must be positive");
  const std::uint64_t seed = seed_given ? a.seed : default_seed();
  Scenario sc = make_scenario(a.locations, seed, a.horizon_s);
  if (!a.stations.empty()) {
    require_file(a.stations);
    sc.stations = stations_from_json(parse_json_text(read_text_file(a.stations), a.stations));
  }
  save_scenario(sc, a.out);
  out << "wrote " << a.out << ": " << sc.requests.size() << " requests, " << sc.stations.size() << " stations, seed "
      << seed << '\n';
  return kOk;
}

struct AccessArgs {
  std::string scenario;
  std::string out;
  double step_s = 1.0;
};

int cmd_access(const AccessArgs& a, std::ostream& out) {
  if (!(a.step_s > 0.0)) throw UsageError("--step-s must be positive");
  require_file(a.scenario);
  Scenario sc = load_scenario(a.scenario);
  AccessOptions opts;
  opts.sweep_step_s = a.step_s;
  sc.set_opportunities(compute_opportunities(sc, opts));
  save_scenario(sc, a.out);
  std::size_t collects = 0;
  std::size_t contacts = 0;
  for (const auto& o : sc.opportunities()) {
    collects += o.mode == Mode::kCollect;
    contacts += o.mode == Mode::kContact;
  }
  out << "wrote " << a.out << ": " << collects << " collect, " << contacts << " contact, "
      << sc.opportunities().size() - collects - contacts << " sunpoint opportunities\n";
  return kOk;
}

struct PlanArgs {
  std::string scenario;
  std::string solver;
  std::string out;
  double gamma = 0.999;
  int d_solve = 0;
  double c = 3.0;
  int n_sim = 500;
  std::size_t n_a_max = 3;
  std::string resources = "off";
  std::uint64_t seed = 0;
  double time_limit_s = 60.0;
};

int cmd_plan(const PlanArgs& a, const CLI::App& sub, std::ostream& out) {
  if (!is_solver(a.solver)) throw UsageError("unknown solver '" + a.solver + "' (valid: " + valid_solvers() + ")");
  SolverParams params;
  params.smdp.gamma = a.gamma;
  params.smdp.n_a_max = a.n_a_max;
  params.smdp.resources_enabled = a.resources == "on";
  if (sub.count("--d-solve")) params.d_solve = a.d_solve;
  params.c = a.c;
  params.n_sim = a.n_sim;
  params.seed = sub.count("--seed") ? a.seed : default_seed();
  params.time_limit_s = a.time_limit_s;
  try {
    params.smdp.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (params.smdp.resources_enabled && !supports_resources(a.solver)) {
    throw UsageError("solver '" + a.solver + "' does not support --resources on");
  }
  const Scenario sc = load_with_opportunities(a.scenario);

  Plan plan;
  try {
    plan = run_solver(a.solver, sc, params);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("solver failed: ") + e.what());
  }
  save_plan(plan, sc, a.out);
  out << std::setprecision(10) << "solver=" << plan.solver_name << " reward=" << plan.total_reward
      << " images=" << plan.images_collected << " runtime_s=" << plan.wall_time_s;
  if (plan.optimal) out << " optimal=" << (*plan.optimal ? "true" : "false");
  out << '\n';
  return kOk;
}

struct ValidateArgs {
  std::string scenario;
  std::string plan;
  std::string trace;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const Scenario sc = load_with_opportunities(a.scenario);
  require_file(a.plan);
  const Plan plan = load_plan(a.plan, sc);
  const SmdpConfig config = config_from_snapshot(plan.config_snapshot);
  const ValidationReport report = validate(plan, sc, config);
  print_report(out, report);
  if (!a.trace.empty()) {
    auto f = open_out(a.trace);
    write_trace_csv(f, report);
  }
  return report.feasible ? kOk : kInfeasible;
}

void write_chart(const fs::path& path, const std::string& title, const std::string& y_label,
                 const std::vector<SummaryRow>& rows, double SummaryRow::*field) {
  BarChart chart;
  chart.title = title;
  chart.y_label = y_label;
  for (const auto& r : rows) {
    chart.bars.push_back({r.solver + " (" + std::string(to_string(r.resource_mode)) + ", " +
                              std::to_string(r.n_locations) + ")",
                          r.*field});
  }
  auto f = open_out(path);
  write_svg(f, chart);
}

struct BenchArgs {
  std::string spec;
  std::string out_dir;
  unsigned jobs = 1;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  require_file(a.spec);
  const ExperimentSpec spec = experiment_from_json(parse_json_text(read_text_file(a.spec), a.spec));
  if (a.jobs == 0) throw UsageError("--jobs must be at least 1");
  const auto rows = run_experiment(spec, a.jobs);
  const auto summary = summarize(rows);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "results.csv");
    write_results_csv(f, rows);
  }
  {
    auto f = open_out(dir / "summary.csv");
    write_summary_csv(f, summary);
  }
  write_chart(dir / "reward.svg", "Total reward", "mean total reward", summary, &SummaryRow::mean_total_reward);
  write_chart(dir / "runtime.svg", "Simulation runtime", "mean runtime (s)", summary, &SummaryRow::mean_runtime_s);
  write_chart(dir / "reward_per_second.svg", "Time-normalized reward", "mean reward per second", summary,
              &SummaryRow::mean_reward_per_second);

  out << std::left << std::setw(12) << "solver" << std::setw(9) << "mode" << std::setw(8) << "n" << std::setw(6)
      << "runs" << std::setw(14) << "reward" << std::setw(14) << "runtime_s" << "reward/s\n";
  out << std::setprecision(6);
  for (const auto& s : summary) {
    out << std::setw(12) << s.solver << std::setw(9) << to_string(s.resource_mode) << std::setw(8) << s.n_locations
        << std::setw(6) << s.runs << std::setw(14) << s.mean_total_reward << std::setw(14) << s.mean_runtime_s
        << s.mean_reward_per_second << '\n';
  }
  const auto errors = std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return !r.error.empty(); });
  if (errors > 0) out << errors << " run(s) failed; see the error column in results.csv\n";
  return kOk;
}

struct GridArgs {
  std::string scenario;
  std::string solver;
  std::string grid;
  std::string out;
  std::string resources = "off";
  std::string metric = "total";
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
};

int cmd_grid(const GridArgs& a, const CLI::App& sub, std::ostream& out) {
  if (!is_solver(a.solver)) throw UsageError("unknown solver '" + a.solver + "' (valid: " + valid_solvers() + ")");
  require_file(a.grid);
  const ParamGrid grid = grid_from_json(parse_json_text(read_text_file(a.grid), a.grid));
  GridOptions opts;
  opts.metric = a.metric == "collect"      ? GridMetric::kCollectReward
                : a.metric == "discounted" ? GridMetric::kDiscountedReturn
                                           : GridMetric::kTotalReward;
  opts.stochastic_repeats = a.repeats;
  opts.base_seed = sub.count("--seed") ? a.seed : default_seed();
  opts.base.seed = opts.base_seed;
  opts.base.smdp.resources_enabled = a.resources == "on";
  if (opts.base.smdp.resources_enabled && !supports_resources(a.solver)) {
    throw UsageError("solver '" + a.solver + "' does not support --resources on");
  }
  const Scenario sc = load_with_opportunities(a.scenario);
  std::vector<GridRow> ranked;
  try {
    ranked = grid_search(sc, a.solver, grid, opts);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  {
    auto f = open_out(a.out);
    write_grid_csv(f, ranked);
  }
  out << "evaluated " << ranked.size() << " grid points; best per n_a_max:\n" << std::setprecision(8);
  for (const auto& r : best_per_n_a_max(ranked)) {
    for (const auto& [k, v] : r.params) out << k << '=' << v << ' ';
    out << "mean=" << metric_of(r, opts.metric) << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Agile Earth-observation satellite task planning toolkit", "orbitsched"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a scenario with random target locations");
  gen_cmd->add_option("--locations", gen.locations, "Number of target locations")->required();
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed (default: $ORBITSCHED_SEED or 0)");
  gen_cmd->add_option("--horizon-s", gen.horizon_s, "Planning horizon in seconds")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Scenario file to write")->required();
  gen_cmd->add_option("--stations", gen.stations, "JSON file with the ground station list");

  AccessArgs access;
  auto* access_cmd = app.add_subcommand("access", "Compute collect, contact and sunpoint opportunities");
  access_cmd->add_option("--scenario", access.scenario, "Scenario file")->required();
  access_cmd->add_option("--out", access.out, "Scenario file to write, with opportunities")->required();
  access_cmd->add_option("--step-s", access.step_s, "Sweep step in seconds")->capture_default_str();

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Run a solver and write a plan");
  plan_cmd->add_option("--scenario", plan.scenario, "Scenario file")->required();
  plan_cmd->add_option("--solver", plan.solver, "forward, mcts, rule, graph or bnb")->required();
  plan_cmd->add_option("--out", plan.out, "Plan file to write")->required();
  plan_cmd->add_option("--gamma", plan.gamma, "Discount per second")->capture_default_str();
  plan_cmd->add_option("--d-solve", plan.d_solve, "Search depth (default 3 forward, 10 mcts)");
  plan_cmd->add_option("--c", plan.c, "MCTS exploration constant")->capture_default_str();
  plan_cmd->add_option("--n-sim", plan.n_sim, "MCTS simulations per step")->capture_default_str();
  plan_cmd->add_option("--n-a-max", plan.n_a_max, "Actions enumerated per state")->capture_default_str();
  plan_cmd->add_option("--resources", plan.resources, "Model power and data")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  plan_cmd->add_option("--seed", plan.seed, "MCTS seed (default: $ORBITSCHED_SEED or 0)");
  plan_cmd->add_option("--time-limit-s", plan.time_limit_s, "bnb time limit")->capture_default_str();

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "Replay a plan and check every constraint");
  val_cmd->add_option("--scenario", val.scenario, "Scenario file")->required();
  val_cmd->add_option("--plan", val.plan, "Plan file")->required();
  val_cmd->add_option("--trace", val.trace, "Write the resource trace as CSV");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment spec; write CSVs and SVG charts");
  bench_cmd->add_option("--spec", bench.spec, "Experiment spec (JSON)")->required();
  bench_cmd->add_option("--out-dir", bench.out_dir, "Output directory")->required();
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->capture_default_str();

  GridArgs grid;
  auto* grid_cmd = app.add_subcommand("grid", "Hyperparameter grid search on one scenario");
  grid_cmd->add_option("--scenario", grid.scenario, "Scenario file")->required();
  grid_cmd->add_option("--solver", grid.solver, "Solver name")->required();
  grid_cmd->add_option("--grid", grid.grid, "JSON object of parameter -> value list")->required();
  grid_cmd->add_option("--out", grid.out, "Ranked CSV to write")->required();
  grid_cmd->add_option("--resources", grid.resources, "Model power and data")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  grid_cmd->add_option("--metric", grid.metric, "Ranking metric")
      ->check(CLI::IsMember({"total", "collect", "discounted"}))
      ->capture_default_str();
  grid_cmd->add_option("--repeats", grid.repeats, "Seeds per point for mcts")->capture_default_str();
  grid_cmd->add_option("--seed", grid.seed, "Base seed (default: $ORBITSCHED_SEED or 0)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, gen_cmd->count("--seed") > 0, out);
    if (*access_cmd) return cmd_access(access, out);
    if (*plan_cmd) return cmd_plan(plan, *plan_cmd, out);
    if (*val_cmd) return cmd_validate(val, out);
    if (*bench_cmd) return cmd_bench(bench, out);
    if (*grid_cmd) return cmd_grid(grid, *grid_cmd, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  }
  return kUsage;
}

}  // namespace orbitsched::cli

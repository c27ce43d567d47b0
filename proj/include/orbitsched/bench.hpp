// Experiment harness: repeated random samplings, every solver on the same precomputed instance,
// result tables, and hyperparameter grid search.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "orbitsched/scenario.hpp"
#include "orbitsched/solvers.hpp"

namespace orbitsched {

enum class ResourceMode { kWithout, kWith };

std::string_view to_string(ResourceMode mode);
ResourceMode resource_mode_from_string(std::string_view name);

struct SolverEntry {
  std::string name;
  std::string label;  // column value in results; defaults to name
  std::map<std::string, double> params;
};

struct ExperimentSpec {
  std::vector<std::size_t> location_counts;
  std::size_t samples_per_count = 1;
  std::vector<SolverEntry> solvers;
  std::vector<ResourceMode> resource_modes{ResourceMode::kWithout};
  std::uint64_t base_seed = 0;
  double horizon_s = 86400.0;

  /// Throws std::invalid_argument naming the offending field.
  void check() const;
};

/// Parses the JSON form; errors are FormatError with the field pointer.
ExperimentSpec experiment_from_json(const nlohmann::json& doc);
nlohmann::ordered_json experiment_to_json(const ExperimentSpec& spec);

struct ResultRow {
  std::string solver;
  ResourceMode resource_mode = ResourceMode::kWithout;
  std::size_t n_locations = 0;
  std::size_t sample_index = 0;
  std::uint64_t scenario_seed = 0;
  double total_reward = 0.0;
  double collect_reward = 0.0;
  std::size_t images_collected = 0;
  double discounted_return = 0.0;
  double runtime_s = 0.0;
  double reward_per_second = 0.0;
  bool feasible = false;
  std::size_t violations = 0;
  std::string error;  // empty unless the solver threw
};

/// Scenario seed for one (count, sample) cell.
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t count, std::size_t sample);

/// Runs every configured solver on each cell's shared instance. Rows are sorted by
/// (n_locations, sample, resource mode, solver order in the spec) regardless of `jobs`.
/// Solvers that do not model resources are not run in the "with" mode.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, unsigned jobs = 1);

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);

struct SummaryRow {
  std::string solver;
  ResourceMode resource_mode = ResourceMode::kWithout;
  std::size_t n_locations = 0;
  std::size_t runs = 0;
  std::size_t errors = 0;
  double mean_total_reward = 0.0;
  double mean_collect_reward = 0.0;
  double mean_runtime_s = 0.0;
  double mean_reward_per_second = 0.0;
};

/// Means over successful runs, grouped by (n_locations, resource mode, solver) in row order.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

// ---------------------------------------------------------------------------------------------

using ParamGrid = std::map<std::string, std::vector<double>>;
using ParamPoint = std::map<std::string, double>;

/// Cartesian product in lexicographic order of parameter names.
std::vector<ParamPoint> expand_grid(const ParamGrid& grid);

struct GridRow {
  ParamPoint params;
  std::size_t runs = 0;
  double mean_total_reward = 0.0;
  double mean_collect_reward = 0.0;
  double mean_discounted_return = 0.0;
  double std_total_reward = 0.0;
  double mean_runtime_s = 0.0;
};

enum class GridMetric { kTotalReward, kCollectReward, kDiscountedReturn };

struct GridOptions {
  GridMetric metric = GridMetric::kTotalReward;
  /// Repetitions with distinct seeds for stochastic solvers.
  std::size_t stochastic_repeats = 10;
  std::uint64_t base_seed = 0;
  /// Parameters not on the grid.
  SolverParams base;
};

/// Evaluates every grid point; rows are ranked by the chosen mean metric, best first. Throws
/// std::invalid_argument when a grid parameter is not recognized by the solver.
std::vector<GridRow> grid_search(const Scenario& scenario, const std::string& solver, const ParamGrid& grid,
                                 const GridOptions& options = {});

double metric_of(const GridRow& row, GridMetric metric);

/// Best row for each n_a_max value present, ascending n_a_max.
std::vector<GridRow> best_per_n_a_max(const std::vector<GridRow>& ranked);

void write_grid_csv(std::ostream& os, const std::vector<GridRow>& rows);

/// Grid file: an object mapping parameter names to arrays of numbers.
ParamGrid grid_from_json(const nlohmann::json& doc);

}  // namespace orbitsched

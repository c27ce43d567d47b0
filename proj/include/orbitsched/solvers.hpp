// Planners over a Scenario. Every planner returns a Plan whose steps replay through the SMDP
// transition, so rewards and resource states are always those the model assigns.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "orbitsched/smdp.hpp"

namespace orbitsched {

struct PlanStep {
  SmdpState state;  // state the action was taken from
  SmdpAction action;
  double reward = 0.0;
};

struct Plan {
  std::vector<PlanStep> steps;
  /// Sum of realized per-step rewards.
  double total_reward = 0.0;
  /// Sum of r_i over images newly collected, without discounting.
  double collect_reward = 0.0;
  std::size_t images_collected = 0;
  /// Rewards discounted back to the initial epoch, the quantity the SMDP searches maximize.
  double discounted_return = 0.0;
  double wall_time_s = 0.0;
  std::string solver_name;
  nlohmann::ordered_json config_snapshot = nlohmann::ordered_json::object();
  /// Set by exact_bnb: true when the search finished inside its time limit.
  std::optional<bool> optimal;
  /// Forward search: SMDP transitions evaluated while choosing each executed action.
  std::vector<std::uint64_t> expansions_per_step;
  /// graph_dp: weight of the extracted longest path.
  std::optional<double> path_weight;
};

/// Appends actions to a plan by replaying them through the model.
class PlanBuilder {
 public:
  explicit PlanBuilder(const SmdpModel& model);

  const SmdpState& state() const { return state_; }
  /// Replays the action from the current state; returns the realized reward.
  double append(const SmdpAction& action);
  Plan finish(std::string solver_name, nlohmann::ordered_json config_snapshot, double wall_time_s);

 private:
  const SmdpModel& model_;
  SmdpState state_;
  double cumulative_discount_ = 1.0;
  Plan plan_;
};

nlohmann::ordered_json snapshot(const SmdpConfig& config);
/// Inverse of snapshot(); missing keys keep their defaults.
SmdpConfig config_from_snapshot(const nlohmann::json& snap);

// ---------------------------------------------------------------------------------------------

struct ForwardSearchConfig {
  int d_solve = 3;
};

/// Exhaustive lookahead to d_solve decision steps, executing the best first action and repeating
/// until no action remains.
Plan forward_search(const Scenario& scenario, const SmdpConfig& smdp, const ForwardSearchConfig& config);

struct MctsConfig {
  int d_solve = 10;
  double c = 3.0;
  int n_sim_max = 500;
  std::uint64_t seed = 0;
};

/// UCT search with uniform random rollouts; the search tree persists across planning steps.
Plan mcts(const Scenario& scenario, const SmdpConfig& smdp, const MctsConfig& config);

/// Takes the earliest feasible action; collects and contacts are swapped for their sunpoint twin
/// when the resulting state would breach p_min or d_max.
Plan rule_based(const Scenario& scenario, const SmdpConfig& smdp);

struct GraphDpOptions {
  /// Credit an image only the first time it appears on a path. With false the node weights are
  /// static and the result is the plain longest weighted path.
  bool distinct_images = true;
};

/// Longest weighted path over collect opportunities in time order. Resources are ignored.
Plan graph_dp(const Scenario& scenario, const SmdpConfig& smdp, const GraphDpOptions& options = {});

struct BnbOptions {
  double time_limit_s = 60.0;
  /// Seed the incumbent with the graph_dp selection.
  bool warm_start = true;
};

/// Exact 0-1 conflict packing (one collect per image, no pairwise agility conflicts) by depth-first
/// branch-and-bound. Resources are ignored.
Plan exact_bnb(const Scenario& scenario, const SmdpConfig& smdp, const BnbOptions& options = {});

/// True when collect opportunities a and b cannot both be taken: overlapping occupancy or a slew
/// that does not fit between the earlier end and the later start.
bool collects_conflict(const Opportunity& a, const Opportunity& b, double slew_rate_deg_s);

// ---------------------------------------------------------------------------------------------
// Name-based dispatch used by the CLI and the benchmark harness.

struct SolverParams {
  SmdpConfig smdp;
  std::optional<int> d_solve;  // solver default when unset: 3 for forward, 10 for mcts
  double c = 3.0;
  int n_sim = 500;
  std::uint64_t seed = 0;
  double time_limit_s = 60.0;

  /// Sets one parameter by name: gamma, d_solve, n_a_max, c, n_sim, seed, time_limit_s, resources.
  void set(std::string_view name, double value);
};

const std::vector<std::string>& solver_names();
bool is_solver(std::string_view name);
/// Parameter names (as accepted by SolverParams::set) that change the named solver's output.
const std::vector<std::string>& solver_parameters(std::string_view name);
/// graph and bnb only model the resource-free problem.
bool supports_resources(std::string_view name);

/// Throws std::invalid_argument for unknown names or unsupported combinations.
Plan run_solver(std::string_view name, const Scenario& scenario, const SolverParams& params);

}  // namespace orbitsched

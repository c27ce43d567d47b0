#include <algorithm>
#include <stdexcept>
#include <string>

#include "orbitsched/solvers.hpp"

namespace orbitsched {

PlanBuilder::PlanBuilder(const SmdpModel& model) : model_(model), state_(model.initial_state()) {}

double PlanBuilder::append(const SmdpAction& action) {
  const Transition tr = model_.step(state_, action);
  plan_.steps.push_back({state_, action, tr.reward});
  plan_.total_reward += tr.reward;
  plan_.discounted_return += cumulative_discount_ * tr.reward;
  if (tr.collected_new) {
    plan_.collect_reward += model_.opportunities()[action.opportunity].reward;
    ++plan_.images_collected;
  }
  cumulative_discount_ *= model_.discount(state_, action);
  state_ = tr.next;
  return tr.reward;
}

Plan PlanBuilder::finish(std::string solver_name, nlohmann::ordered_json config_snapshot, double wall_time_s) {
  Plan out = std::move(plan_);
  out.solver_name = std::move(solver_name);
  out.config_snapshot = std::move(config_snapshot);
  out.wall_time_s = wall_time_s;
  plan_ = Plan{};
  state_ = model_.initial_state();
  cumulative_discount_ = 1.0;
  return out;
}

nlohmann::ordered_json snapshot(const SmdpConfig& config) {
  nlohmann::ordered_json j;
  j["gamma"] = config.gamma;
  j["n_a_max"] = config.n_a_max == kUnlimitedActions ? nlohmann::ordered_json(nullptr)
                                                      : nlohmann::ordered_json(config.n_a_max);
  j["resources"] = config.resources_enabled;
  j["literal_duration_reward"] = config.literal_duration_reward;
  j["literal_resource_interval"] = config.literal_resource_interval;
  j["agility_from_start"] = config.agility_from_start;
  return j;
}

SmdpConfig config_from_snapshot(const nlohmann::json& snap) {
  SmdpConfig c;
  if (!snap.is_object()) return c;
  c.gamma = snap.value("gamma", c.gamma);
  if (snap.contains("n_a_max")) {
    c.n_a_max = snap["n_a_max"].is_null() ? kUnlimitedActions : snap["n_a_max"].get<std::size_t>();
  }
  c.resources_enabled = snap.value("resources", c.resources_enabled);
  c.literal_duration_reward = snap.value("literal_duration_reward", c.literal_duration_reward);
  c.literal_resource_interval = snap.value("literal_resource_interval", c.literal_resource_interval);
  c.agility_from_start = snap.value("agility_from_start", c.agility_from_start);
  c.check();
  return c;
}

bool collects_conflict(const Opportunity& a, const Opportunity& b, double slew_rate_deg_s) {
  if (a.t_s == b.t_s) return true;
  const Opportunity& first = a.t_s < b.t_s ? a : b;
  const Opportunity& second = a.t_s < b.t_s ? b : a;
  if (second.t_s < first.t_e) return true;
  return !slew_feasible({first.pointing_end.direction, first.t_e}, {second.pointing_start.direction, second.t_s},
                        slew_rate_deg_s);
}

void SolverParams::set(std::string_view name, double value) {
  if (name == "gamma") {
    smdp.gamma = value;
  } else if (name == "d_solve") {
    d_solve = static_cast<int>(value);
  } else if (name == "n_a_max") {
    smdp.n_a_max = static_cast<std::size_t>(value);
  } else if (name == "c") {
    c = value;
  } else if (name == "n_sim") {
    n_sim = static_cast<int>(value);
  } else if (name == "seed") {
    seed = static_cast<std::uint64_t>(value);
  } else if (name == "time_limit_s") {
    time_limit_s = value;
  } else if (name == "resources") {
    smdp.resources_enabled = value != 0.0;
  } else {
    throw std::invalid_argument("unknown solver parameter '" + std::string(name) + "'");
  }
}

const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names{"forward", "mcts", "rule", "graph", "bnb"};
  return names;
}

bool is_solver(std::string_view name) {
  const auto& names = solver_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<std::string>& solver_parameters(std::string_view name) {
  static const std::vector<std::string> forward{"gamma", "d_solve", "n_a_max", "resources"};
  static const std::vector<std::string> tree{"gamma", "d_solve", "n_a_max", "resources", "c", "n_sim", "seed"};
  static const std::vector<std::string> rule{"gamma", "n_a_max", "resources"};
  static const std::vector<std::string> graph{"gamma"};
  static const std::vector<std::string> bnb{"gamma", "time_limit_s"};
  static const std::vector<std::string> none;
  if (name == "forward") return forward;
  if (name == "mcts") return tree;
  if (name == "rule") return rule;
  if (name == "graph") return graph;
  if (name == "bnb") return bnb;
  return none;
}

bool supports_resources(std::string_view name) { return name != "graph" && name != "bnb"; }

Plan run_solver(std::string_view name, const Scenario& scenario, const SolverParams& params) {
  if (!is_solver(name)) {
    std::string valid;
    for (const auto& n : solver_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown solver '" + std::string(name) + "' (valid: " + valid + ")");
  }
  if (params.smdp.resources_enabled && !supports_resources(name)) {
    throw std::invalid_argument("solver '" + std::string(name) + "' does not model resources");
  }
  if (name == "forward") return forward_search(scenario, params.smdp, {params.d_solve.value_or(3)});
  if (name == "mcts") {
    return mcts(scenario, params.smdp, {params.d_solve.value_or(10), params.c, params.n_sim, params.seed});
  }
  if (name == "rule") return rule_based(scenario, params.smdp);
  if (name == "graph") return graph_dp(scenario, params.smdp);
  return exact_bnb(scenario, params.smdp, {params.time_limit_s, true});
}

}  // namespace orbitsched

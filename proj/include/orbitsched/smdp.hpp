// Semi-Markov decision process over a precomputed opportunity list.
//
// A state records the time of the last decision epoch, the start time of the last collect or
// contact (and which opportunity that was, so its pointing can be recovered), the set of images
// collected so far, and the power/data fill fractions. Actions are opportunities; decisions happen
// only at opportunity start times, so the time between epochs is variable.
#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "orbitsched/scenario.hpp"

namespace orbitsched {

struct SmdpState {
  double t = 0.0;
  double t_s_p = 0.0;
  /// Opportunity index that set t_s_p; -1 before the first collect or contact.
  int prev = -1;
  std::vector<bool> collected;
  double d = 0.0;
  double p = 1.0;

  std::size_t images_collected() const;
  bool operator==(const SmdpState&) const = default;
};

struct SmdpAction {
  std::size_t opportunity = 0;  // index into Scenario::opportunities()
  int opportunity_id = 0;
  Mode mode = Mode::kSunpoint;
  double t_s = 0.0;
  double t_e = 0.0;
  int location = -1;

  bool operator==(const SmdpAction&) const = default;
};

inline constexpr std::size_t kUnlimitedActions = std::numeric_limits<std::size_t>::max();

struct SmdpConfig {
  double gamma = 0.999;  // per-second discount, in (0, 1]
  std::size_t n_a_max = 3;
  bool resources_enabled = false;
  /// Contact/sunpoint reward proportional to (t_s - t) instead of the action duration.
  bool literal_duration_reward = false;
  /// Integrate resources over (t_s - t_s_p) instead of the time since the last epoch.
  bool literal_resource_interval = false;
  /// Evaluate agility from the previous action's start pointing and start time.
  bool agility_from_start = false;

  /// Throws std::invalid_argument when gamma or n_a_max are out of range.
  void check() const;
};

inline constexpr double kContactRewardRate = 1e-1;
inline constexpr double kSunpointRewardRate = 1e-4;
inline constexpr double kViolationPenalty = -1e4;

struct Transition {
  SmdpState next;
  double reward = 0.0;
  /// True when the action added its image to the collected set.
  bool collected_new = false;
};

/// Precomputed view of a scenario for fast repeated queries. Holds references; the scenario must
/// outlive the model.
class SmdpModel {
 public:
  SmdpModel(const Scenario& scenario, const SmdpConfig& config);

  const Scenario& scenario() const { return scenario_; }
  const SmdpConfig& config() const { return config_; }
  const std::vector<Opportunity>& opportunities() const { return opps_; }

  SmdpState initial_state() const;
  SmdpAction action(std::size_t index) const;

  /// Feasible actions with t_s > state.t, earliest first, truncated to n_a_max.
  std::vector<SmdpAction> action_space(const SmdpState& state) const;
  void action_space(const SmdpState& state, std::vector<SmdpAction>& out) const;

  /// Agility check from the state's previous collect/contact to the opportunity at `index`.
  bool agile(const SmdpState& state, std::size_t index) const;

  Transition step(const SmdpState& state, const SmdpAction& action) const;
  SmdpState transition(const SmdpState& state, const SmdpAction& action) const { return step(state, action).next; }
  double reward(const SmdpState& state, const SmdpAction& action) const { return step(state, action).reward; }

  /// gamma^(action.t_s - state.t)
  double discount(const SmdpState& state, const SmdpAction& action) const;

 private:
  const Scenario& scenario_;
  SmdpConfig config_;
  const std::vector<Opportunity>& opps_;
  std::vector<double> starts_;
};

std::vector<SmdpAction> action_space(const SmdpState& state, const Scenario& scenario, const SmdpConfig& config);
SmdpState transition(const SmdpState& state, const SmdpAction& action, const Scenario& scenario,
                     const SmdpConfig& config);
double reward(const SmdpState& state, const SmdpAction& action, const Scenario& scenario, const SmdpConfig& config);

}  // namespace orbitsched

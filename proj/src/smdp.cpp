#include "orbitsched/smdp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace orbitsched {

std::size_t SmdpState::images_collected() const {
  return static_cast<std::size_t>(std::count(collected.begin(), collected.end(), true));
}

void SmdpConfig::check() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1], got " + std::to_string(gamma));
  }
  if (n_a_max < 1) throw std::invalid_argument("n_a_max must be >= 1");
}

SmdpModel::SmdpModel(const Scenario& scenario, const SmdpConfig& config)
    : scenario_(scenario), config_(config), opps_(scenario.opportunities()) {
  config_.check();
  starts_.reserve(opps_.size());
  for (const auto& o : opps_) starts_.push_back(o.t_s);
}

SmdpState SmdpModel::initial_state() const {
  SmdpState s;
  s.collected.assign(scenario_.requests.size(), false);
  s.p = scenario_.spacecraft.p0;
  s.d = scenario_.spacecraft.d0;
  return s;
}

SmdpAction SmdpModel::action(std::size_t index) const {
  const auto& o = opps_[index];
  return {index, o.id, o.mode, o.t_s, o.t_e, o.location};
}

bool SmdpModel::agile(const SmdpState& state, std::size_t index) const {
  const auto& cand = opps_[index];
  if (!cand.occupies_pointing() || state.prev < 0) return true;
  const auto& prev = opps_[static_cast<std::size_t>(state.prev)];
  const PointingVector& from = config_.agility_from_start ? prev.pointing_start : prev.pointing_end;
  const PointingVector to{cand.pointing_start.direction, cand.t_s};
  const PointingVector origin{from.direction, config_.agility_from_start ? prev.t_s : prev.t_e};
  return slew_feasible(origin, to, scenario_.spacecraft.slew_rate_deg_s);
}

void SmdpModel::action_space(const SmdpState& state, std::vector<SmdpAction>& out) const {
  out.clear();
  auto first = std::upper_bound(starts_.begin(), starts_.end(), state.t);
  for (auto i = static_cast<std::size_t>(first - starts_.begin()); i < opps_.size(); ++i) {
    const auto& o = opps_[i];
    if (!config_.resources_enabled && o.mode == Mode::kContact) continue;
    if (!agile(state, i)) continue;
    out.push_back(action(i));
    if (out.size() >= config_.n_a_max) break;
  }
}

std::vector<SmdpAction> SmdpModel::action_space(const SmdpState& state) const {
  std::vector<SmdpAction> out;
  action_space(state, out);
  return out;
}

double SmdpModel::discount(const SmdpState& state, const SmdpAction& action) const {
  return std::pow(config_.gamma, action.t_s - state.t);
}

Transition SmdpModel::step(const SmdpState& state, const SmdpAction& a) const {
  assert(a.t_s > state.t);
  const auto& sc = scenario_.spacecraft;
  Transition out;
  SmdpState& next = out.next;
  next = state;

  const bool pointing_mode = a.mode == Mode::kCollect || a.mode == Mode::kContact;
  if (a.mode == Mode::kCollect) {
    const auto loc = static_cast<std::size_t>(a.location);
    const bool resources_ok = !config_.resources_enabled || (state.p > sc.p_min && state.d < sc.d_max);
    if (!state.collected[loc] && resources_ok) {
      next.collected[loc] = true;
      out.collected_new = true;
    }
  }

  if (config_.resources_enabled) {
    const double elapsed = config_.literal_resource_interval ? a.t_s - state.t_s_p : a.t_s - state.t;
    next.p = std::clamp(state.p + elapsed * sc.power_rates[a.mode], 0.0, 1.0);
    next.d = std::clamp(state.d + elapsed * sc.data_rates[a.mode], 0.0, 1.0);
  }

  next.t = a.t_s;
  if (pointing_mode) {
    next.t_s_p = next.t;
    next.prev = static_cast<int>(a.opportunity);
  }

  double r = 0.0;
  if (out.collected_new) {
    r += std::pow(config_.gamma, a.t_s - state.t) * opps_[a.opportunity].reward;
  }
  const double basis = config_.literal_duration_reward ? a.t_s - state.t : a.t_e - a.t_s;
  if (a.mode == Mode::kContact) r += kContactRewardRate * basis;
  if (a.mode == Mode::kSunpoint) r += kSunpointRewardRate * basis;
  if (config_.resources_enabled) {
    if (next.p <= sc.p_min) r += kViolationPenalty;
    if (next.d >= sc.d_max) r += kViolationPenalty;
  }
  out.reward = r;
  return out;
}

std::vector<SmdpAction> action_space(const SmdpState& state, const Scenario& scenario, const SmdpConfig& config) {
  return SmdpModel(scenario, config).action_space(state);
}

SmdpState transition(const SmdpState& state, const SmdpAction& action, const Scenario& scenario,
                     const SmdpConfig& config) {
  return SmdpModel(scenario, config).transition(state, action);
}

double reward(const SmdpState& state, const SmdpAction& action, const Scenario& scenario, const SmdpConfig& config) {
  return SmdpModel(scenario, config).reward(state, action);
}

}  // namespace orbitsched

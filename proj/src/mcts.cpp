#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "orbitsched/solvers.hpp"

namespace orbitsched {

namespace {

// Resources are quantized so float noise does not split otherwise identical tree nodes.
constexpr double kResourceQuantum = 1e-6;

struct StateKey {
  double t;
  double t_s_p;
  int prev;
  std::int64_t p_q;
  std::int64_t d_q;
  std::vector<bool> collected;

  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::size_t h = std::hash<std::vector<bool>>{}(k.collected);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(std::hash<double>{}(k.t));
    mix(std::hash<double>{}(k.t_s_p));
    mix(std::hash<int>{}(k.prev));
    mix(std::hash<std::int64_t>{}(k.p_q));
    mix(std::hash<std::int64_t>{}(k.d_q));
    return h;
  }
};

StateKey key_of(const SmdpState& s) {
  return {s.t,
          s.t_s_p,
          s.prev,
          std::llround(s.p / kResourceQuantum),
          std::llround(s.d / kResourceQuantum),
          s.collected};
}

struct Node {
  std::vector<SmdpAction> actions;
  std::vector<std::uint32_t> n;
  std::vector<double> q;
};

class Uct {
 public:
  Uct(const SmdpModel& model, const MctsConfig& config) : model_(model), config_(config), rng_(config.seed) {}

  double simulate(const SmdpState& s, int depth) {
    if (depth == 0) return 0.0;
    auto it = tree_.find(key_of(s));
    if (it == tree_.end()) {
      Node node;
      model_.action_space(s, node.actions);
      node.n.assign(node.actions.size(), 0);  // N0 = 0
      node.q.assign(node.actions.size(), 0.0);  // Q0 = 0
      tree_.emplace(key_of(s), std::move(node));
      return rollout(s, depth);
    }
    Node& node = it->second;
    if (node.actions.empty()) return 0.0;

    const std::size_t i = select_ucb(node);
    const SmdpAction a = node.actions[i];
    const Transition tr = model_.step(s, a);
    const double q = tr.reward + model_.discount(s, a) * simulate(tr.next, depth - 1);
    // The recursive call may rehash the table, so look the node up again.
    Node& updated = tree_.find(key_of(s))->second;
    updated.n[i] += 1;
    updated.q[i] += (q - updated.q[i]) / static_cast<double>(updated.n[i]);
    return q;
  }

  double rollout(const SmdpState& s, int depth) {
    if (depth == 0) return 0.0;
    model_.action_space(s, scratch_);
    if (scratch_.empty()) return 0.0;
    std::uniform_int_distribution<std::size_t> pick(0, scratch_.size() - 1);
    const SmdpAction a = scratch_[pick(rng_)];
    const Transition tr = model_.step(s, a);
    return tr.reward + model_.discount(s, a) * rollout(tr.next, depth - 1);
  }

  /// argmax Q over tried actions, earliest on ties; the earliest action when nothing was tried.
  std::optional<SmdpAction> best(const SmdpState& s) const {
    auto it = tree_.find(key_of(s));
    if (it == tree_.end() || it->second.actions.empty()) return std::nullopt;
    const Node& node = it->second;
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < node.actions.size(); ++i) {
      if (node.n[i] == 0) continue;
      if (!pick || node.q[i] > node.q[*pick]) pick = i;
    }
    return node.actions[pick.value_or(0)];
  }

  /// Nodes earlier than the current epoch are unreachable once time has advanced.
  void prune_before(double t) {
    std::erase_if(tree_, [t](const auto& kv) { return kv.first.t < t; });
  }

 private:
  std::size_t select_ucb(const Node& node) const {
    // Untried actions first, in time order, so N(s,a) = 0 never reaches the division.
    for (std::size_t i = 0; i < node.n.size(); ++i) {
      if (node.n[i] == 0) return i;
    }
    double total = 0.0;
    for (auto v : node.n) total += v;
    const double log_total = std::log(total);
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.n.size(); ++i) {
      const double score = node.q[i] + config_.c * std::sqrt(log_total / node.n[i]);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }

  const SmdpModel& model_;
  MctsConfig config_;
  std::mt19937_64 rng_;
  std::unordered_map<StateKey, Node, StateKeyHash> tree_;
  std::vector<SmdpAction> scratch_;
};

}  // namespace

Plan mcts(const Scenario& scenario, const SmdpConfig& smdp, const MctsConfig& config) {
  if (config.d_solve < 1) throw std::invalid_argument("mcts d_solve must be >= 1");
  if (!(config.c >= 0.0)) throw std::invalid_argument("mcts exploration weight c must be >= 0");
  if (config.n_sim_max < 1) throw std::invalid_argument("mcts n_sim_max must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const SmdpModel model(scenario, smdp);
  PlanBuilder builder(model);
  Uct uct(model, config);

  for (;;) {
    const SmdpState s = builder.state();
    for (int n = 0; n < config.n_sim_max; ++n) uct.simulate(s, config.d_solve);
    const auto a = uct.best(s);
    if (!a) break;
    builder.append(*a);
    uct.prune_before(builder.state().t);
  }

  auto snap = snapshot(smdp);
  snap["d_solve"] = config.d_solve;
  snap["c"] = config.c;
  snap["n_sim_max"] = config.n_sim_max;
  snap["seed"] = config.seed;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return builder.finish("mcts", std::move(snap), wall);
}

}  // namespace orbitsched

#include <chrono>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "orbitsched/solvers.hpp"

namespace orbitsched {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Choice {
  std::optional<SmdpAction> action;
  double value = kNegInf;
};

class ForwardSearcher {
 public:
  ForwardSearcher(const SmdpModel& model, int depth) : model_(model), buffers_(static_cast<std::size_t>(depth) + 1) {}

  // An empty action set yields (none, -inf); callers treat that child as terminal with value 0.
  Choice select(const SmdpState& s, int depth) {
    if (depth == 0) return {std::nullopt, 0.0};
    auto& actions = buffers_[static_cast<std::size_t>(depth)];
    model_.action_space(s, actions);
    Choice best;
    for (const auto& a : actions) {
      ++expansions_;
      const Transition tr = model_.step(s, a);
      const Choice child = select(tr.next, depth - 1);
      const double tail = child.action ? child.value : 0.0;
      const double v = tr.reward + model_.discount(s, a) * tail;
      // Strict comparison keeps the earliest action on ties.
      if (v > best.value) best = {a, v};
    }
    return best;
  }

  std::uint64_t take_expansions() { return std::exchange(expansions_, 0); }

 private:
  const SmdpModel& model_;
  std::vector<std::vector<SmdpAction>> buffers_;
  std::uint64_t expansions_ = 0;
};

}  // namespace

Plan forward_search(const Scenario& scenario, const SmdpConfig& smdp, const ForwardSearchConfig& config) {
  if (config.d_solve < 1) throw std::invalid_argument("forward search d_solve must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const SmdpModel model(scenario, smdp);
  PlanBuilder builder(model);
  ForwardSearcher search(model, config.d_solve);
  std::vector<std::uint64_t> expansions;

  for (;;) {
    const Choice choice = search.select(builder.state(), config.d_solve);
    const std::uint64_t n = search.take_expansions();
    if (!choice.action) break;
    expansions.push_back(n);
    builder.append(*choice.action);
  }

  auto snap = snapshot(smdp);
  snap["d_solve"] = config.d_solve;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Plan plan = builder.finish("forward", std::move(snap), wall);
  plan.expansions_per_step = std::move(expansions);
  return plan;
}

}  // namespace orbitsched

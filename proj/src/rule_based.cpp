#include <chrono>
#include <vector>

#include "orbitsched/solvers.hpp"

namespace orbitsched {

Plan rule_based(const Scenario& scenario, const SmdpConfig& smdp) {
  const auto t0 = std::chrono::steady_clock::now();
  const SmdpModel model(scenario, smdp);
  const auto& sc = scenario.spacecraft;
  PlanBuilder builder(model);
  std::vector<SmdpAction> actions;

  for (;;) {
    model.action_space(builder.state(), actions);
    if (actions.empty()) break;
    SmdpAction a = actions.front();
    if (a.mode != Mode::kSunpoint && smdp.resources_enabled) {
      const SmdpState next = model.transition(builder.state(), a);
      if (!(next.p > sc.p_min && next.d <= sc.d_max)) {
        const int twin = scenario.twin_of(a.opportunity);
        // Without a twin there is no equivalent sunpoint; skip to the next action in time.
        if (twin < 0) {
          if (actions.size() < 2) break;
          a = actions[1];
        } else {
          a = model.action(static_cast<std::size_t>(twin));
        }
      }
    }
    builder.append(a);
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return builder.finish("rule", snapshot(smdp), wall);
}

}  // namespace orbitsched

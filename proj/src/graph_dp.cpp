#include <algorithm>
#include <chrono>
#include <cstdint>
#include <vector>

#include "orbitsched/solvers.hpp"

namespace orbitsched {

namespace {

using Bits = std::vector<std::uint64_t>;

bool test(const Bits& b, std::size_t i) { return (b[i >> 6] >> (i & 63)) & 1U; }
void set(Bits& b, std::size_t i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }

}  // namespace

Plan graph_dp(const Scenario& scenario, const SmdpConfig& smdp, const GraphDpOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  SmdpConfig config = smdp;
  config.resources_enabled = false;
  const SmdpModel model(scenario, config);
  const auto& opps = model.opportunities();
  const double rate = scenario.spacecraft.slew_rate_deg_s;
  // Only actions starting after the initial epoch are in the first action space.
  const double start_t = model.initial_state().t;

  // Nodes are collect opportunities, already in ascending t_s.
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < opps.size(); ++i) {
    if (opps[i].mode == Mode::kCollect && opps[i].t_s > start_t) nodes.push_back(i);
  }
  const std::size_t n = nodes.size();
  const std::size_t words = (scenario.requests.size() + 63) / 64;

  // PropagateWeights
  std::vector<double> best(n);
  std::vector<int> pred(n, -1);
  std::vector<Bits> images;
  if (options.distinct_images) images.assign(n, Bits(words, 0));
  for (std::size_t i = 0; i < n; ++i) {
    best[i] = opps[nodes[i]].reward;
    if (options.distinct_images) set(images[i], static_cast<std::size_t>(opps[nodes[i]].location));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Opportunity& from = opps[nodes[i]];
    for (std::size_t k = i + 1; k < n; ++k) {
      const Opportunity& to = opps[nodes[k]];
      if (to.t_s < from.t_e) continue;
      if (collects_conflict(from, to, rate)) continue;
      const auto image = static_cast<std::size_t>(to.location);
      const double gain = options.distinct_images && test(images[i], image) ? 0.0 : to.reward;
      if (best[i] + gain > best[k]) {
        best[k] = best[i] + gain;
        pred[k] = static_cast<int>(i);
        if (options.distinct_images) {
          images[k] = images[i];
          set(images[k], image);
        }
      }
    }
  }

  // ExtractPath
  std::vector<std::size_t> path;
  double weight = 0.0;
  if (n > 0) {
    const auto last = static_cast<std::size_t>(std::max_element(best.begin(), best.end()) - best.begin());
    weight = best[last];
    for (int v = static_cast<int>(last); v >= 0; v = pred[static_cast<std::size_t>(v)]) {
      path.push_back(nodes[static_cast<std::size_t>(v)]);
    }
    std::reverse(path.begin(), path.end());
  }

  PlanBuilder builder(model);
  for (std::size_t idx : path) builder.append(model.action(idx));

  auto snap = snapshot(config);
  snap["distinct_images"] = options.distinct_images;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Plan plan = builder.finish("graph", std::move(snap), wall);
  plan.path_weight = weight;
  return plan;
}

}  // namespace orbitsched

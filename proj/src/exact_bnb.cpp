#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "orbitsched/solvers.hpp"

namespace orbitsched {

namespace {

using Bits = std::vector<std::uint64_t>;

inline bool test(const Bits& b, std::size_t i) { return (b[i >> 6] >> (i & 63)) & 1U; }
inline void set(Bits& b, std::size_t i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }
inline void reset(Bits& b, std::size_t i) { b[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

// Lagrangian branch-and-bound. Variables are indexed in ascending t_s. A node is the set of variables
// still allowed ("free"). Its bound relaxes the one-per-image rows into the objective, which leaves a
// longest path through the time-ordered compatibility DAG. Branching splits on an image that the
// relaxed path uses twice, or on a conflicting pair the path contains.
class Packer {
 public:
  struct Var {
    double reward = 0.0;
    int image = 0;
    double t_s = 0.0;
    double t_e = 0.0;
  };

  // Pairs whose gap exceeds `far_gap_s` are compatible unless they share an image.
  Packer(std::vector<Var> vars, std::vector<Bits> conflict, std::size_t n_images, double far_gap_s,
         double time_limit_s)
      : vars_(std::move(vars)),
        conflict_(std::move(conflict)),
        n_images_(n_images),
        deadline_(std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                          std::chrono::duration<double>(time_limit_s))) {
    const std::size_t n = vars_.size();
    image_vars_.resize(n_images_);
    for (std::size_t i = 0; i < n; ++i) image_vars_[static_cast<std::size_t>(vars_[i].image)].push_back(i);
    image_free_.assign(n_images_, 0);
    image_best_.assign(n_images_, 0.0);

    std::vector<double> latest_end(n);
    for (std::size_t i = 0; i < n; ++i) latest_end[i] = std::max(i ? latest_end[i - 1] : vars_[i].t_e, vars_[i].t_e);
    far_cut_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto it = std::lower_bound(latest_end.begin(), latest_end.begin() + static_cast<std::ptrdiff_t>(j),
                                       vars_[j].t_s - far_gap_s);
      far_cut_[j] = static_cast<std::size_t>(it - latest_end.begin());
    }
    by_reward_.resize(n);
    std::iota(by_reward_.begin(), by_reward_.end(), std::size_t{0});
    std::stable_sort(by_reward_.begin(), by_reward_.end(),
                     [&](std::size_t a, std::size_t b) { return vars_[a].reward > vars_[b].reward; });
    integral_ = std::all_of(vars_.begin(), vars_.end(), [](const Var& v) { return v.reward == std::floor(v.reward); });
    path_best_.resize(n);
    path_prefix_.resize(n + 1);
    path_pred_.resize(n);
  }

  void offer_incumbent(const std::vector<std::size_t>& selection) {
    double v = 0.0;
    for (std::size_t i = 0; i < selection.size(); ++i) {
      for (std::size_t j = i + 1; j < selection.size(); ++j) {
        if (test(conflict_[selection[i]], selection[j])) return;
      }
      v += vars_[selection[i]].reward;
    }
    if (v > best_value_ + 1e-12) {
      best_value_ = v;
      best_ = selection;
    }
  }

  void solve() {
    const std::size_t n = vars_.size();
    Bits free((n + 63) / 64, 0);
    for (std::size_t i = 0; i < n; ++i) set(free, i);
    std::vector<double> lambda(n_images_, 0.0);
    dfs(free, lambda, kRootIterations);
  }

  bool timed_out() const { return timed_out_; }
  const std::vector<std::size_t>& best() const { return best_; }
  double best_value() const { return best_value_; }

 private:
  static constexpr int kRootIterations = 300;
  static constexpr int kNodeIterations = 30;
  static constexpr double kEps = 1e-9;

  bool out_of_time() {
    if (!timed_out_ && (++nodes_ & 63U) == 0 && std::chrono::steady_clock::now() > deadline_) timed_out_ = true;
    return timed_out_;
  }

  void dfs(Bits& free, std::vector<double> lambda, int iterations) {
    if (out_of_time()) return;
    if (cheap_bound(free) <= best_value_ + kEps) return;
    if (tune(free, lambda, iterations) <= best_value_ + kEps) return;

    // tune() leaves path_ as the relaxed solution under the returned multipliers.
    const std::vector<std::size_t> path = path_;
    std::size_t a = 0;
    std::size_t b = 0;
    bool clash = false;
    for (std::size_t i = 0; i < path.size() && !clash; ++i) {
      for (std::size_t j = i + 1; j < path.size(); ++j) {
        if (test(conflict_[path[i]], path[j])) {
          a = path[i];
          b = path[j];
          clash = true;
          break;
        }
      }
    }

    if (clash && vars_[a].image == vars_[b].image) {
      const auto img = static_cast<std::size_t>(vars_[a].image);
      std::vector<std::size_t> on_path;
      for (std::size_t v : path) {
        if (static_cast<std::size_t>(vars_[v].image) == img) on_path.push_back(v);
      }
      branch_on_image(free, lambda, img, on_path);
      return;
    }
    if (clash) {
      Bits saved = free;
      reset(free, b);
      dfs(free, lambda, kNodeIterations);
      free = saved;
      reset(free, a);
      dfs(free, lambda, kNodeIterations);
      free = saved;
      return;
    }

    // The path is feasible but the bound is not closed: some image with a positive multiplier and
    // several free variables is absent from the path.
    std::size_t pick = n_images_;
    double pick_lambda = 0.0;
    for (std::size_t g = 0; g < n_images_; ++g) {
      if (image_free_[g] >= 2 && lambda[g] > pick_lambda) {
        pick = g;
        pick_lambda = lambda[g];
      }
    }
    if (pick == n_images_) return;
    std::vector<std::size_t> members;
    for (std::size_t v : image_vars_[pick]) {
      if (test(free, v)) members.push_back(v);
    }
    branch_on_image(free, lambda, pick, members);
  }

  // Children: the image keeps only members[k], for each k; then none of `members`.
  void branch_on_image(Bits& free, const std::vector<double>& lambda, std::size_t img,
                       const std::vector<std::size_t>& members) {
    Bits saved = free;
    for (std::size_t keep : members) {
      for (std::size_t v : image_vars_[img]) {
        if (v != keep) reset(free, v);
      }
      dfs(free, lambda, kNodeIterations);
      free = saved;
      if (timed_out_) return;
    }
    for (std::size_t v : members) reset(free, v);
    dfs(free, lambda, kNodeIterations);
    free = saved;
  }

  // Longest path through the free variables in time order with weights reward - lambda[image], plus
  // the multipliers of every image that still has two or more free variables.
  double lagrangian(const Bits& free, const std::vector<double>& lambda) {
    const std::size_t n = vars_.size();
    double multipliers = 0.0;
    for (std::size_t g = 0; g < n_images_; ++g) {
      if (image_free_[g] >= 2) multipliers += lambda[g];
    }
    path_prefix_[0] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      path_prefix_[j + 1] = path_prefix_[j];
      if (!test(free, j)) continue;
      const auto img = static_cast<std::size_t>(vars_[j].image);
      double from = path_prefix_[far_cut_[j]];
      int pred = from > 0.0 ? static_cast<int>(prefix_arg(far_cut_[j])) : -1;
      for (std::size_t i = far_cut_[j]; i < j; ++i) {
        if (test(free, i) && !test(conflict_[j], i) && path_best_[i] > from) {
          from = path_best_[i];
          pred = static_cast<int>(i);
        }
      }
      const double weight = vars_[j].reward - (image_free_[img] >= 2 ? lambda[img] : 0.0);
      path_best_[j] = weight + from;
      path_pred_[j] = pred;
      path_prefix_[j + 1] = std::max(path_prefix_[j], path_best_[j]);
    }
    path_.clear();
    if (path_prefix_[n] > 0.0) {
      for (int v = static_cast<int>(prefix_arg(n)); v >= 0; v = path_pred_[static_cast<std::size_t>(v)]) {
        path_.push_back(static_cast<std::size_t>(v));
      }
      std::reverse(path_.begin(), path_.end());
    }
    return path_prefix_[n] + multipliers;
  }

  // With integer rewards no selection beats the floor of a bound.
  double rounded(double bound) const { return integral_ ? std::floor(bound + 1e-6) : bound; }

  // Index of the earliest best path end among the first k variables.
  std::size_t prefix_arg(std::size_t k) const {
    std::size_t i = k;
    while (i > 0 && path_prefix_[i - 1] == path_prefix_[k]) --i;
    return i - 1;
  }

  // Subgradient descent on the multipliers. Returns the best bound found and leaves `lambda` and
  // `path_` at the corresponding point. Every relaxed path is also tried as an incumbent.
  double tune(const Bits& free, std::vector<double>& lambda, int iterations) {
    std::fill(image_free_.begin(), image_free_.end(), 0);
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      if (test(free, v)) ++image_free_[static_cast<std::size_t>(vars_[v].image)];
    }
    fill_free_ = &free;
    std::vector<double> best_lambda = lambda;
    double best_bound = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_path;
    std::vector<int> count(n_images_, 0);
    double theta = 1.0;
    int stale = 0;
    for (int iter = 0; iter < iterations; ++iter) {
      const double value = lagrangian(free, lambda);
      try_path();
      if (value < best_bound - 1e-12) {
        best_bound = value;
        best_lambda = lambda;
        best_path = path_;
        stale = 0;
      } else if (++stale >= 5) {
        theta *= 0.5;
        stale = 0;
      }
      if (rounded(best_bound) <= best_value_ + kEps || theta < 1e-3) break;

      for (std::size_t v : path_) ++count[static_cast<std::size_t>(vars_[v].image)];
      double norm = 0.0;
      for (std::size_t g = 0; g < n_images_; ++g) {
        if (image_free_[g] < 2) continue;
        const double grad = 1.0 - count[g];
        if (grad > 0.0 && lambda[g] == 0.0) continue;  // projected direction is zero
        norm += grad * grad;
      }
      if (norm == 0.0) {
        for (std::size_t v : path_) count[static_cast<std::size_t>(vars_[v].image)] = 0;
        break;
      }
      const double step = theta * std::max(value - best_value_, 1e-3) / norm;
      for (std::size_t g = 0; g < n_images_; ++g) {
        if (image_free_[g] >= 2) lambda[g] = std::max(0.0, lambda[g] - step * (1.0 - count[g]));
      }
      for (std::size_t v : path_) count[static_cast<std::size_t>(vars_[v].image)] = 0;
    }
    lambda = best_lambda;
    path_ = best_path;
    return rounded(best_bound);
  }

  // Keeps the first visit of each image on the relaxed path and offers the result as an incumbent.
  void try_path() {
    scratch_.clear();
    for (std::size_t v : path_) {
      bool ok = true;
      for (std::size_t u : scratch_) {
        if (test(conflict_[u], v)) {
          ok = false;
          break;
        }
      }
      if (ok) scratch_.push_back(v);
    }
    // Fill with any remaining free variable that fits, best reward first.
    for (std::size_t v : by_reward_) {
      if (!test(*fill_free_, v)) continue;
      bool ok = true;
      for (std::size_t u : scratch_) {
        if (u == v || test(conflict_[u], v)) {
          ok = false;
          break;
        }
      }
      if (ok) scratch_.push_back(v);
    }
    offer_incumbent(scratch_);
  }

  // min of two quick relaxations: one collect per image, and a greedy clique cover in time order
  // where each clique contributes its best reward.
  double cheap_bound(const Bits& free) {
    std::fill(image_best_.begin(), image_best_.end(), 0.0);
    double clique_total = 0.0;
    double clique_max = 0.0;
    bool open = false;
    clique_common_.assign(free.size(), 0);
    for (std::size_t w = 0; w < free.size(); ++w) {
      std::uint64_t word = free[w];
      while (word) {
        const std::size_t i = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
        word &= word - 1;
        auto& ib = image_best_[static_cast<std::size_t>(vars_[i].image)];
        ib = std::max(ib, vars_[i].reward);
        if (open && test(clique_common_, i)) {
          for (std::size_t k = 0; k < clique_common_.size(); ++k) clique_common_[k] &= conflict_[i][k];
          clique_max = std::max(clique_max, vars_[i].reward);
        } else {
          clique_total += clique_max;
          clique_common_ = conflict_[i];
          clique_max = vars_[i].reward;
          open = true;
        }
      }
    }
    clique_total += clique_max;
    const double image_total = std::accumulate(image_best_.begin(), image_best_.end(), 0.0);
    return rounded(std::min(image_total, clique_total));
  }

  std::vector<Var> vars_;
  std::vector<Bits> conflict_;
  std::size_t n_images_;
  std::chrono::steady_clock::time_point deadline_;
  std::vector<std::vector<std::size_t>> image_vars_;
  std::vector<int> image_free_;
  std::vector<double> image_best_;
  std::vector<std::size_t> far_cut_;
  std::vector<double> path_best_;
  std::vector<double> path_prefix_;
  std::vector<int> path_pred_;
  std::vector<std::size_t> path_;
  std::vector<std::size_t> scratch_;
  std::vector<std::size_t> by_reward_;
  const Bits* fill_free_ = nullptr;
  bool integral_ = false;
  Bits clique_common_;
  std::vector<std::size_t> best_;
  double best_value_ = 0.0;
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
};

}  // namespace

Plan exact_bnb(const Scenario& scenario, const SmdpConfig& smdp, const BnbOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  SmdpConfig config = smdp;
  config.resources_enabled = false;
  const SmdpModel model(scenario, config);
  const auto& opps = model.opportunities();
  const double rate = scenario.spacecraft.slew_rate_deg_s;
  // Only actions starting after the initial epoch are in the first action space.
  const double start_t = model.initial_state().t;

  std::vector<std::size_t> vars;  // opportunity index of each variable
  for (std::size_t i = 0; i < opps.size(); ++i) {
    if (opps[i].mode == Mode::kCollect && opps[i].t_s > start_t) vars.push_back(i);
  }
  const std::size_t n = vars.size();
  std::vector<Bits> conflict(n, Bits((n + 63) / 64, 0));
  std::vector<Packer::Var> items(n);
  const double far_gap = 180.0 / rate;  // beyond a half-turn of slew time every later window is reachable
  for (std::size_t i = 0; i < n; ++i) {
    const Opportunity& a = opps[vars[i]];
    items[i] = {a.reward, a.location, a.t_s, a.t_e};
    for (std::size_t j = i + 1; j < n; ++j) {
      const Opportunity& b = opps[vars[j]];
      if (b.t_s - a.t_e > far_gap && a.location != b.location) continue;
      if (a.location == b.location || collects_conflict(a, b, rate)) {
        set(conflict[i], j);
        set(conflict[j], i);
      }
    }
  }

  Packer packer(std::move(items), std::move(conflict), scenario.requests.size(), far_gap, options.time_limit_s);
  if (options.warm_start && n > 0) {
    const Plan seed = graph_dp(scenario, config);
    std::vector<std::size_t> selection;
    std::vector<bool> seen(scenario.requests.size(), false);
    for (const auto& step : seed.steps) {
      const auto loc = static_cast<std::size_t>(step.action.location);
      if (seen[loc]) continue;
      seen[loc] = true;
      const auto it = std::lower_bound(vars.begin(), vars.end(), step.action.opportunity);
      selection.push_back(static_cast<std::size_t>(it - vars.begin()));
    }
    packer.offer_incumbent(selection);
  }
  packer.solve();

  std::vector<std::size_t> chosen = packer.best();
  std::sort(chosen.begin(), chosen.end());
  PlanBuilder builder(model);
  for (std::size_t v : chosen) builder.append(model.action(vars[v]));

  auto snap = snapshot(config);
  snap["time_limit_s"] = options.time_limit_s;
  snap["warm_start"] = options.warm_start;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Plan plan = builder.finish("bnb", std::move(snap), wall);
  plan.optimal = !packer.timed_out();
  return plan;
}

}  // namespace orbitsched

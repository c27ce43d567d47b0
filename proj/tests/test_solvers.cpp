#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "orbitsched/solvers.hpp"
#include "orbitsched/validate.hpp"

using namespace orbitsched;

namespace {

struct Window {
  int image;
  double t_s;
  double t_e;
  Vec3 dir = Vec3::UnitZ();
};

// Collects (plus sunpoint twins) on hand-placed windows; rewards taken from `rewards` per image.
Scenario hand(const std::vector<Window>& windows, const std::vector<double>& rewards) {
  Scenario sc = make_scenario(rewards.size(), 1, 1000.0);
  for (std::size_t i = 0; i < rewards.size(); ++i) sc.requests[i].reward = rewards[i];
  std::vector<Opportunity> ops;
  int id = 0;
  for (const auto& w : windows) {
    Opportunity o;
    o.id = id++;
    o.mode = Mode::kCollect;
    o.location = w.image;
    o.t_s = w.t_s;
    o.t_e = w.t_e;
    o.reward = rewards[static_cast<std::size_t>(w.image)];
    o.pointing_start = {w.dir.normalized(), w.t_s};
    o.pointing_end = {w.dir.normalized(), w.t_e};
    Opportunity s = o;
    s.id = id++;
    s.mode = Mode::kSunpoint;
    s.location = -1;
    s.reward = 0.0;
    ops.push_back(o);
    ops.push_back(s);
  }
  sc.set_opportunities(ops);
  return sc;
}

Scenario synthetic(std::uint64_t seed, std::size_t collects, std::size_t images, int max_reward = 5) {
  SyntheticSpec spec;
  spec.n_collects = collects;
  spec.n_images = images;
  spec.max_reward = max_reward;
  spec.span_s = 400.0;
  return make_synthetic_scenario(spec, seed);
}

std::vector<int> ids(const Plan& p) {
  std::vector<int> out;
  for (const auto& s : p.steps) out.push_back(s.action.opportunity_id);
  return out;
}

void expect_valid(const Plan& plan, const Scenario& sc, const SmdpConfig& cfg) {
  const auto rep = validate(plan, sc, cfg);
  EXPECT_TRUE(rep.feasible) << plan.solver_name << ": " << (rep.violations.empty() ? "" : rep.violations[0].detail);
  EXPECT_NEAR(rep.recomputed_reward, plan.total_reward, 1e-9) << plan.solver_name;
  for (std::size_t i = 1; i < plan.steps.size(); ++i) EXPECT_LT(plan.steps[i - 1].action.t_s, plan.steps[i].action.t_s);
}

}  // namespace

TEST(GraphDp, ChainTakesAll) {
  const Scenario sc = hand({{0, 10, 20}, {1, 30, 40}, {2, 50, 60}}, {1, 1, 1});
  const Plan p = graph_dp(sc, SmdpConfig{});
  EXPECT_EQ(p.images_collected, 3U);
  EXPECT_DOUBLE_EQ(p.collect_reward, 3.0);
  ASSERT_TRUE(p.path_weight);
  EXPECT_DOUBLE_EQ(*p.path_weight, 3.0);
  EXPECT_EQ(ids(p), (std::vector<int>{0, 2, 4}));
}

TEST(GraphDp, ConflictPicksHeavier) {
  const Scenario sc = hand({{0, 10, 40}, {1, 20, 50}}, {1, 2});
  EXPECT_DOUBLE_EQ(graph_dp(sc, SmdpConfig{}).collect_reward, 2.0);
  EXPECT_DOUBLE_EQ(exact_bnb(sc, SmdpConfig{}).collect_reward, 2.0);
}

TEST(GraphDp, MatchesPathEnumeration) {
  GraphDpOptions opt;
  opt.distinct_images = false;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Scenario sc = synthetic(seed, 10, 10);
    const Plan p = graph_dp(sc, SmdpConfig{}, opt);
    ASSERT_TRUE(p.path_weight);
    EXPECT_DOUBLE_EQ(*p.path_weight, oracle::best_path(sc)) << seed;
  }
}

TEST(Bnb, SlewConflictRespected) {
  // 90 deg apart with a 30 s gap: cannot do both at 1 deg/s.
  const Scenario sc = hand({{0, 10, 20, Vec3::UnitX()}, {1, 50, 60, Vec3::UnitY()}}, {1, 1});
  EXPECT_TRUE(collects_conflict(sc.opportunities()[0], sc.opportunities()[2], 1.0));
  EXPECT_DOUBLE_EQ(exact_bnb(sc, SmdpConfig{}).collect_reward, 1.0);
  const Scenario wide = hand({{0, 10, 20, Vec3::UnitX()}, {1, 120, 130, Vec3::UnitY()}}, {1, 1});
  EXPECT_DOUBLE_EQ(exact_bnb(wide, SmdpConfig{}).collect_reward, 2.0);
}

TEST(GraphDp, SkipsWindowOpenAtEpoch) {
  // A window starting at t = 0 is not in the first action space (t_s > t is required).
  const Scenario sc = hand({{0, 0, 10}, {1, 30, 40}}, {5, 1});
  for (const Plan& p : {graph_dp(sc, SmdpConfig{}), exact_bnb(sc, SmdpConfig{})}) {
    EXPECT_DOUBLE_EQ(p.collect_reward, 1.0);
    expect_valid(p, sc, SmdpConfig{});
  }
}

TEST(Bnb, OnePerImage) {
  const Scenario sc = hand({{0, 10, 20}, {0, 30, 40}, {0, 50, 60}}, {1});
  const Plan p = exact_bnb(sc, SmdpConfig{});
  EXPECT_EQ(p.steps.size(), 1U);
  EXPECT_DOUBLE_EQ(p.collect_reward, 1.0);
  ASSERT_TRUE(p.optimal);
  EXPECT_TRUE(*p.optimal);
}

TEST(Bnb, MatchesSubsetEnumeration) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Scenario sc = synthetic(seed, 12, 7);
    const Plan p = exact_bnb(sc, SmdpConfig{});
    EXPECT_DOUBLE_EQ(p.collect_reward, oracle::best_subset(sc)) << seed;
    EXPECT_TRUE(p.optimal.value_or(false));
    expect_valid(p, sc, SmdpConfig{});
  }
}

TEST(Bnb, IgnoresResourceFlag) {
  const Scenario sc = synthetic(1, 6, 6);
  SmdpConfig cfg;
  cfg.resources_enabled = true;
  EXPECT_EQ(ids(exact_bnb(sc, cfg)), ids(exact_bnb(sc, SmdpConfig{})));
  EXPECT_EQ(ids(graph_dp(sc, cfg)), ids(graph_dp(sc, SmdpConfig{})));
}

TEST(Forward, FullDepthMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Scenario sc = synthetic(seed, 4, 3);
    SmdpConfig cfg;
    cfg.gamma = 0.995;
    cfg.n_a_max = kUnlimitedActions;
    const Plan p = forward_search(sc, cfg, {static_cast<int>(sc.opportunities().size())});
    oracle::Sim sim{sc, cfg.gamma, false};
    EXPECT_NEAR(p.discounted_return, sim.best_return(sim.start()), 1e-9) << seed;
  }
}

TEST(Forward, ExpansionBound) {
  const Scenario sc = synthetic(3, 40, 30);
  for (int d : {1, 2, 3, 4}) {
    SmdpConfig cfg;
    const Plan p = forward_search(sc, cfg, {d});
    ASSERT_EQ(p.expansions_per_step.size(), p.steps.size());
    std::uint64_t bound = 0;
    for (int k = 1; k <= d; ++k) bound += static_cast<std::uint64_t>(std::pow(3, k));
    for (auto e : p.expansions_per_step) EXPECT_LE(e, bound);
  }
}

TEST(Forward, DeeperNeverWorseOnShortInstances) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scenario sc = synthetic(seed, 5, 4);
    SmdpConfig cfg;
    cfg.n_a_max = kUnlimitedActions;
    const Plan full = forward_search(sc, cfg, {20});
    const Plan shallow = forward_search(sc, cfg, {1});
    EXPECT_GE(full.discounted_return + 1e-9, shallow.discounted_return);
  }
}

TEST(Mcts, ReproducibleForSeed) {
  const Scenario sc = synthetic(4, 10, 6);
  SmdpConfig cfg;
  MctsConfig mc;
  mc.n_sim_max = 300;
  mc.seed = 99;
  const Plan a = mcts(sc, cfg, mc);
  const Plan b = mcts(sc, cfg, mc);
  EXPECT_EQ(ids(a), ids(b));
  EXPECT_EQ(a.total_reward, b.total_reward);
  EXPECT_EQ(a.discounted_return, b.discounted_return);
}

TEST(Mcts, FindsOptimumOnTinyInstance) {
  const Scenario sc = synthetic(5, 3, 3);
  SmdpConfig cfg;
  cfg.gamma = 0.995;
  cfg.n_a_max = kUnlimitedActions;
  MctsConfig mc;
  mc.n_sim_max = 2000;
  mc.d_solve = 6;
  const Plan p = mcts(sc, cfg, mc);
  oracle::Sim sim{sc, cfg.gamma, false};
  EXPECT_NEAR(p.discounted_return, sim.best_return(sim.start()), 1e-9);
}

TEST(Rule, TakesEarliestWithoutResources) {
  const Scenario sc = synthetic(6, 8, 8);
  SmdpConfig cfg;
  const Plan p = rule_based(sc, cfg);
  SmdpModel m(sc, cfg);
  auto s = m.initial_state();
  for (const auto& step : p.steps) {
    const auto acts = m.action_space(s);
    ASSERT_FALSE(acts.empty());
    EXPECT_EQ(step.action, acts.front());
    s = m.transition(s, step.action);
  }
  EXPECT_TRUE(m.action_space(s).empty());
}

TEST(Rule, SwapsToSunpointWhenResourcesWouldBreach) {
  const Scenario base = hand({{0, 10, 20}, {1, 30, 40}}, {1, 1});
  Scenario sc = base;
  sc.spacecraft.p0 = 0.305;  // the first collect's draw pushes p to the threshold
  sc.spacecraft.power_rates.collect = -1e-3;
  SmdpConfig cfg;
  cfg.resources_enabled = true;
  const Plan p = rule_based(sc, cfg);
  ASSERT_FALSE(p.steps.empty());
  EXPECT_EQ(p.steps.front().action.mode, Mode::kSunpoint);
}

TEST(Solvers, DominanceWithoutResources) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Scenario sc = synthetic(seed, 12, 8);
    SmdpConfig cfg;
    const double bnb = exact_bnb(sc, cfg).collect_reward;
    const double graph = graph_dp(sc, cfg).collect_reward;
    const double rule = rule_based(sc, cfg).collect_reward;
    EXPECT_GE(bnb, graph) << seed;
    EXPECT_GE(graph, rule) << seed;
  }
}

TEST(Solvers, EveryPlanValidatesOnOrbitScenario) {
  const Scenario sc = with_opportunities(make_scenario(25, 11, 43200.0));
  for (bool resources : {false, true}) {
    for (const auto& name : solver_names()) {
      if (resources && !supports_resources(name)) continue;
      SolverParams params;
      params.smdp.resources_enabled = resources;
      params.n_sim = 100;
      params.seed = 3;
      const Plan p = run_solver(name, sc, params);
      const auto rep = validate(p, sc, params.smdp);
      EXPECT_NEAR(rep.recomputed_reward, p.total_reward, 1e-9) << name;
      if (!resources) EXPECT_TRUE(rep.feasible) << name;
      for (const auto& v : rep.violations) {
        EXPECT_TRUE(v.kind == ViolationKind::kPower || v.kind == ViolationKind::kData) << name << ": " << v.detail;
      }
    }
  }
}

TEST(Solvers, Dispatch) {
  const Scenario sc = synthetic(1, 6, 6);
  EXPECT_THROW(run_solver("milp", sc, SolverParams{}), std::invalid_argument);
  SolverParams params;
  params.smdp.resources_enabled = true;
  EXPECT_THROW(run_solver("bnb", sc, params), std::invalid_argument);
  EXPECT_TRUE(is_solver("mcts"));
  EXPECT_FALSE(is_solver("MCTS"));
  EXPECT_THROW(params.set("bogus", 1.0), std::invalid_argument);
  params.set("n_a_max", 4);
  EXPECT_EQ(params.smdp.n_a_max, 4U);
  const auto snap = snapshot(params.smdp);
  const auto back = config_from_snapshot(snap);
  EXPECT_EQ(back.n_a_max, params.smdp.n_a_max);
  EXPECT_EQ(back.gamma, params.smdp.gamma);
  EXPECT_EQ(back.resources_enabled, params.smdp.resources_enabled);
}

TEST(Plans, TotalsConsistent) {
  const Scenario sc = synthetic(2, 10, 6);
  SmdpConfig cfg;
  cfg.gamma = 0.99;
  const Plan p = forward_search(sc, cfg, {3});
  double total = 0.0, disc = 0.0;
  for (const auto& s : p.steps) {
    total += s.reward;
    disc += std::pow(0.99, s.state.t) * s.reward;
  }
  EXPECT_NEAR(p.total_reward, total, 1e-9);
  EXPECT_NEAR(p.discounted_return, disc, 1e-9);
}

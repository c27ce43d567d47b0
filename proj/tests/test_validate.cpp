#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "orbitsched/validate.hpp"

using namespace orbitsched;

namespace {

Scenario two_targets(double gap_s, const Vec3& second_dir, int second_image = 1) {
  Scenario sc = make_scenario(2, 1, 1000.0);
  auto make = [](int id, Mode mode, int loc, double t_s, double t_e, const Vec3& dir) {
    Opportunity o;
    o.id = id;
    o.mode = mode;
    o.location = loc;
    o.t_s = t_s;
    o.t_e = t_e;
    o.reward = mode == Mode::kCollect ? 1.0 : 0.0;
    o.pointing_start = {dir, t_s};
    o.pointing_end = {dir, t_e};
    return o;
  };
  sc.set_opportunities({make(0, Mode::kCollect, 0, 10, 20, Vec3::UnitX()),
                        make(1, Mode::kSunpoint, -1, 10, 20, Vec3::UnitX()),
                        make(2, Mode::kCollect, second_image, 20 + gap_s, 30 + gap_s, second_dir),
                        make(3, Mode::kSunpoint, -1, 20 + gap_s, 30 + gap_s, second_dir)});
  return sc;
}

Plan plan_of(const Scenario& sc, const SmdpConfig& cfg, const std::vector<std::size_t>& idx,
             const std::vector<double>& rewards) {
  SmdpModel m(sc, cfg);
  Plan p;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    PlanStep s;
    s.action = m.action(idx[k]);
    s.reward = rewards[k];
    p.steps.push_back(s);
    p.total_reward += rewards[k];
  }
  return p;
}

}  // namespace

TEST(Validate, SlewTooFast) {
  SmdpConfig cfg;
  cfg.gamma = 1.0;
  const Scenario sc = two_targets(30.0, Vec3::UnitY());  // 90 deg in 30 s at 1 deg/s
  const auto rep = validate(plan_of(sc, cfg, {0, 2}, {1, 1}), sc, cfg);
  EXPECT_FALSE(rep.feasible);
  ASSERT_EQ(rep.violations.size(), 1U);
  EXPECT_EQ(rep.violations[0].kind, ViolationKind::kSlew);
  EXPECT_EQ(rep.violations[0].step, 1U);
  EXPECT_EQ(rep.count(ViolationKind::kSlew), 1U);

  const Scenario ok = two_targets(90.0, Vec3::UnitY());
  EXPECT_TRUE(validate(plan_of(ok, cfg, {0, 2}, {1, 1}), ok, cfg).feasible);
}

TEST(Validate, SunpointIsWildcard) {
  SmdpConfig cfg;
  const Scenario sc = two_targets(5.0, Vec3::UnitY());
  EXPECT_TRUE(validate(plan_of(sc, cfg, {0, 3}, {1, 1e-3}), sc, cfg).feasible);
}

TEST(Validate, DuplicateCollectCountedOnce) {
  SmdpConfig cfg;
  cfg.gamma = 1.0;
  const Scenario sc = two_targets(50.0, Vec3::UnitX(), 0);
  const auto rep = validate(plan_of(sc, cfg, {0, 2}, {1, 1}), sc, cfg);
  EXPECT_NEAR(rep.recomputed_reward, 1.0, 1e-12);
  EXPECT_NEAR(rep.reported_reward, 2.0, 1e-12);
  EXPECT_EQ(rep.images_collected, 1U);
  EXPECT_EQ(rep.count(ViolationKind::kDuplicateCollect), 1U);
  EXPECT_FALSE(rep.feasible);
}

TEST(Validate, OutOfOrderAndUnknown) {
  SmdpConfig cfg;
  const Scenario sc = two_targets(50.0, Vec3::UnitX());
  auto rep = validate(plan_of(sc, cfg, {2, 0}, {1, 1}), sc, cfg);
  EXPECT_GE(rep.count(ViolationKind::kOverlap), 1U);
  Plan p = plan_of(sc, cfg, {0}, {1});
  p.steps[0].action.opportunity_id = 42;
  rep = validate(p, sc, cfg);
  EXPECT_EQ(rep.count(ViolationKind::kUnknownOpportunity), 1U);
}

TEST(Validate, ResourceBreachFlagged) {
  Scenario sc = two_targets(50.0, Vec3::UnitX());
  sc.spacecraft.p0 = 0.305;
  sc.spacecraft.power_rates.collect = -1e-3;
  SmdpConfig cfg;
  cfg.resources_enabled = true;
  cfg.gamma = 1.0;
  const auto rep = validate(plan_of(sc, cfg, {0}, {1 - 1e4}), sc, cfg);
  EXPECT_EQ(rep.count(ViolationKind::kPower), 1U);
  EXPECT_NEAR(rep.recomputed_reward, 1.0 - 1e4, 1e-9);
}

TEST(Validate, TraceAndCsv) {
  Scenario sc = two_targets(50.0, Vec3::UnitX());
  SmdpConfig cfg;
  cfg.resources_enabled = true;
  const auto rep = validate(plan_of(sc, cfg, {0, 2}, {1, 1}), sc, cfg);
  ASSERT_EQ(rep.resource_trace.size(), 3U);
  EXPECT_EQ(rep.resource_trace[0].t, 0.0);
  EXPECT_EQ(rep.resource_trace[1].t, 10.0);
  EXPECT_EQ(rep.resource_trace[2].t, 70.0);
  EXPECT_NEAR(rep.resource_trace[1].p, 1.0 - 10 * 5e-4, 1e-12);
  std::ostringstream csv;
  write_trace_csv(csv, rep);
  EXPECT_EQ(csv.str().substr(0, 8), "t_s,p,d\n");
  std::ostringstream txt;
  print_report(txt, rep);
  EXPECT_FALSE(txt.str().empty());
}

// Random plans, valid or not: the validator's recomputation agrees with the oracle simulator.
TEST(Validate, RecomputationMatchesOracle) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SyntheticSpec spec;
    spec.n_collects = 12;
    spec.n_images = 6;
    spec.n_contacts = 2;
    Scenario sc = make_synthetic_scenario(spec, seed);
    sc.spacecraft.power_rates = {-3e-3, -3e-3, 1e-3};
    sc.spacecraft.data_rates = {5e-3, -6e-3, 1e-4};
    sc.spacecraft.d0 = 0.6;
    SmdpConfig cfg;
    cfg.gamma = 0.997;
    cfg.resources_enabled = true;
    oracle::Sim sim{sc, cfg.gamma, true};
    auto st = sim.start();
    std::vector<std::size_t> idx;
    std::vector<double> rewards;
    double expected = 0.0;
    while (true) {
      const auto acts = sim.actions(st);
      if (acts.empty()) break;
      const std::size_t a = acts[std::uniform_int_distribution<std::size_t>(0, acts.size() - 1)(rng)];
      const double r = sim.apply(st, a);
      idx.push_back(a);
      rewards.push_back(r);
      expected += r;
    }
    const auto rep = validate(plan_of(sc, cfg, idx, rewards), sc, cfg);
    EXPECT_NEAR(rep.recomputed_reward, expected, 1e-9) << seed;
    for (const auto& v : rep.violations) {
      EXPECT_TRUE(v.kind == ViolationKind::kPower || v.kind == ViolationKind::kData) << v.detail;
    }
    for (const auto& tp : rep.resource_trace) {
      EXPECT_GE(tp.p, 0.0);
      EXPECT_LE(tp.p, 1.0);
      EXPECT_GE(tp.d, 0.0);
      EXPECT_LE(tp.d, 1.0);
    }
  }
}

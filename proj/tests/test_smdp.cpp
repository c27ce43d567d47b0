#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "orbitsched/smdp.hpp"

using namespace orbitsched;

namespace {

Scenario synthetic(std::uint64_t seed, std::size_t collects = 14, std::size_t contacts = 3) {
  SyntheticSpec spec;
  spec.n_collects = collects;
  spec.n_images = collects / 2 + 1;
  spec.n_contacts = contacts;
  spec.span_s = 900.0;
  spec.max_reward = 3;
  return make_synthetic_scenario(spec, seed);
}

SpacecraftConfig aggressive() {
  SpacecraftConfig c = SpacecraftConfig::defaults();
  c.power_rates = {-4e-3, -3e-3, 1e-3};
  c.data_rates = {6e-3, -8e-3, 2e-4};
  c.p0 = 0.6;
  c.d0 = 0.5;
  return c;
}

std::vector<std::size_t> indices(const std::vector<SmdpAction>& acts) {
  std::vector<std::size_t> out;
  for (const auto& a : acts) out.push_back(a.opportunity);
  return out;
}

}  // namespace

TEST(SmdpConfigTest, Checks) {
  SmdpConfig c;
  EXPECT_NO_THROW(c.check());
  c.gamma = 0.0;
  EXPECT_THROW(c.check(), std::invalid_argument);
  c.gamma = 1.0;
  EXPECT_NO_THROW(c.check());
  c.n_a_max = 0;
  EXPECT_THROW(c.check(), std::invalid_argument);
}

TEST(Smdp, InitialState) {
  Scenario sc = synthetic(1);
  SmdpModel m(sc, SmdpConfig{});
  const auto s = m.initial_state();
  EXPECT_EQ(s.t, 0.0);
  EXPECT_EQ(s.prev, -1);
  EXPECT_EQ(s.images_collected(), 0U);
  EXPECT_EQ(s.p, sc.spacecraft.p0);
  EXPECT_EQ(s.d, sc.spacecraft.d0);
}

TEST(Smdp, ActionSpaceTruncatesEarliestFirst) {
  Scenario sc = synthetic(2);
  SmdpConfig cfg;
  cfg.n_a_max = kUnlimitedActions;
  SmdpModel full(sc, cfg);
  cfg.n_a_max = 3;
  SmdpModel cut(sc, cfg);
  const auto s = full.initial_state();
  const auto all = full.action_space(s);
  const auto three = cut.action_space(s);
  ASSERT_GE(all.size(), 3U);
  ASSERT_EQ(three.size(), 3U);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(all[i], three[i]);
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LE(all[i - 1].t_s, all[i].t_s);
}

// Action sets, rewards and successors agree with the independent simulator along random walks.
class AgainstOracle : public ::testing::TestWithParam<bool> {};

TEST_P(AgainstOracle, RandomTrajectories) {
  const bool resources = GetParam();
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Scenario sc = synthetic(seed);
    if (resources) sc.spacecraft = aggressive();
    SmdpConfig cfg;
    cfg.gamma = 0.995;
    cfg.n_a_max = kUnlimitedActions;
    cfg.resources_enabled = resources;
    SmdpModel m(sc, cfg);
    oracle::Sim sim{sc, cfg.gamma, resources};
    auto s = m.initial_state();
    auto o = sim.start();
    for (int step = 0; step < 200; ++step) {
      const auto acts = m.action_space(s);
      ASSERT_EQ(indices(acts), sim.actions(o)) << "seed " << seed << " step " << step;
      if (acts.empty()) break;
      const std::size_t k = std::uniform_int_distribution<std::size_t>(0, acts.size() - 1)(rng);
      const auto tr = m.step(s, acts[k]);
      bool got = false;
      const double r = sim.apply(o, acts[k].opportunity, &got);
      EXPECT_NEAR(tr.reward, r, 1e-9);
      EXPECT_EQ(tr.collected_new, got);
      EXPECT_NEAR(m.discount(s, acts[k]), std::pow(cfg.gamma, acts[k].t_s - s.t), 1e-12);
      s = tr.next;
      EXPECT_EQ(s.t, o.t);
      EXPECT_EQ(s.prev, o.prev);
      EXPECT_NEAR(s.p, o.p, 1e-12);
      EXPECT_NEAR(s.d, o.d, 1e-12);
      for (std::size_t i = 0; i < o.have.size(); ++i) EXPECT_EQ(s.collected[i], o.have[i] != 0);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Resources, AgainstOracle, ::testing::Values(false, true));

TEST(Smdp, StructuralInvariants) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Scenario sc = synthetic(seed + 100);
    sc.spacecraft = aggressive();
    SmdpConfig cfg;
    cfg.resources_enabled = true;
    SmdpModel m(sc, cfg);
    auto s = m.initial_state();
    while (true) {
      const auto acts = m.action_space(s);
      if (acts.empty()) break;
      const auto& a = acts[std::uniform_int_distribution<std::size_t>(0, acts.size() - 1)(rng)];
      const auto t1 = m.step(s, a);
      const auto t2 = m.step(s, a);
      EXPECT_EQ(t1.next, t2.next);
      EXPECT_EQ(t1.reward, t2.reward);
      EXPECT_GT(t1.next.t, s.t);
      EXPECT_GE(t1.next.p, 0.0);
      EXPECT_LE(t1.next.p, 1.0);
      EXPECT_GE(t1.next.d, 0.0);
      EXPECT_LE(t1.next.d, 1.0);
      std::size_t grown = 0;
      for (std::size_t i = 0; i < s.collected.size(); ++i) {
        if (s.collected[i]) EXPECT_TRUE(t1.next.collected[i]);
        if (!s.collected[i] && t1.next.collected[i]) ++grown;
      }
      EXPECT_LE(grown, 1U);
      s = t1.next;
    }
  }
}

TEST(Smdp, ResourceFreeIgnoresResourceParameters) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Scenario a = synthetic(seed);
    Scenario b = a;
    b.spacecraft = aggressive();
    SmdpConfig cfg;
    SmdpModel ma(a, cfg), mb(b, cfg);
    auto sa = ma.initial_state();
    auto sb = mb.initial_state();
    while (true) {
      const auto aa = ma.action_space(sa);
      ASSERT_EQ(aa, mb.action_space(sb));
      if (aa.empty()) break;
      const auto ta = ma.step(sa, aa.back());
      const auto tb = mb.step(sb, aa.back());
      EXPECT_EQ(ta.reward, tb.reward);
      EXPECT_EQ(ta.next.collected, tb.next.collected);
      sa = ta.next;
      sb = tb.next;
    }
  }
}

TEST(Smdp, RewardTable) {
  Scenario sc = synthetic(3);
  SmdpConfig cfg;
  cfg.gamma = 0.99;
  cfg.n_a_max = kUnlimitedActions;
  SmdpModel m(sc, cfg);
  const auto s = m.initial_state();
  for (const auto& a : m.action_space(s)) {
    const auto& o = sc.opportunities()[a.opportunity];
    const double r = m.reward(s, a);
    if (o.mode == Mode::kCollect) EXPECT_NEAR(r, std::pow(0.99, o.t_s) * o.reward, 1e-12);
    if (o.mode == Mode::kSunpoint) EXPECT_NEAR(r, 1e-4 * (o.t_e - o.t_s), 1e-12);
  }
  cfg.literal_duration_reward = true;
  SmdpModel lit(sc, cfg);
  for (const auto& a : lit.action_space(s)) {
    const auto& o = sc.opportunities()[a.opportunity];
    if (o.mode == Mode::kSunpoint) EXPECT_NEAR(lit.reward(s, a), 1e-4 * o.t_s, 1e-12);
  }
}

TEST(Smdp, ContactRewardWhenResourcesOn) {
  Scenario sc = synthetic(4, 6, 4);
  SmdpConfig cfg;
  cfg.n_a_max = kUnlimitedActions;
  cfg.resources_enabled = true;
  SmdpModel m(sc, cfg);
  const auto s = m.initial_state();
  bool saw = false;
  for (const auto& a : m.action_space(s)) {
    if (a.mode != Mode::kContact) continue;
    saw = true;
    EXPECT_NEAR(m.reward(s, a), 0.1 * (a.t_e - a.t_s), 1e-12);
  }
  EXPECT_TRUE(saw);
  cfg.resources_enabled = false;
  SmdpModel off(sc, cfg);
  for (const auto& a : off.action_space(s)) EXPECT_NE(a.mode, Mode::kContact);
}

TEST(Smdp, CollectBlockedAndPenalised) {
  Scenario sc = synthetic(5);
  sc.spacecraft.p0 = 0.31;
  SmdpConfig cfg;
  cfg.resources_enabled = true;
  cfg.n_a_max = kUnlimitedActions;
  SmdpModel m(sc, cfg);
  auto s = m.initial_state();
  s.p = 0.30;  // at the threshold: collect is blocked
  for (const auto& a : m.action_space(s)) {
    if (a.mode != Mode::kCollect) continue;
    const auto tr = m.step(s, a);
    EXPECT_FALSE(tr.collected_new);
    EXPECT_LE(tr.reward, -1e4 + 1e-9);  // post-state still below p_min
    break;
  }
  s.p = 0.9;
  s.d = 0.75;
  for (const auto& a : m.action_space(s)) {
    if (a.mode != Mode::kCollect) continue;
    EXPECT_FALSE(m.step(s, a).collected_new);
    break;
  }
}

TEST(Smdp, AgilityFromPreviousEnd) {
  Scenario sc = synthetic(6);
  SmdpConfig cfg;
  cfg.n_a_max = kUnlimitedActions;
  SmdpModel m(sc, cfg);
  const auto& ops = sc.opportunities();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].mode != Mode::kCollect) continue;
    auto s = m.step(m.initial_state(), m.action(i)).next;
    for (std::size_t j = 0; j < ops.size(); ++j) {
      if (!(ops[j].t_s > s.t)) continue;
      const bool expect =
          ops[j].mode == Mode::kSunpoint || oracle::can_follow(ops[i], ops[j], sc.spacecraft.slew_rate_deg_s);
      EXPECT_EQ(m.agile(s, j), expect) << i << " -> " << j;
    }
  }
}

TEST(Smdp, FreeFunctionsMatchModel) {
  Scenario sc = synthetic(7);
  SmdpConfig cfg;
  SmdpModel m(sc, cfg);
  const auto s = m.initial_state();
  const auto acts = action_space(s, sc, cfg);
  EXPECT_EQ(acts, m.action_space(s));
  ASSERT_FALSE(acts.empty());
  EXPECT_EQ(transition(s, acts[0], sc, cfg), m.transition(s, acts[0]));
  EXPECT_EQ(reward(s, acts[0], sc, cfg), m.reward(s, acts[0]));
}

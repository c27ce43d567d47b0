#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "orbitsched/astro.hpp"

using namespace orbitsched;

namespace {

constexpr double kR = 6378.137;
constexpr double kW = 7.2921159e-5;

Vec3 site_inertial(double lat_deg, double lon_deg, double t) {
  const double lat = lat_deg * oracle::kPi / 180.0;
  const double lon = lon_deg * oracle::kPi / 180.0 + kW * t;
  return kR * Vec3(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
}

double elevation_ref(const Vec3& sat, const Vec3& site) {
  const Vec3 los = sat - site;
  return std::asin(site.normalized().dot(los.normalized())) * 180.0 / oracle::kPi;
}

}  // namespace

TEST(Orbit, PeriodMatchesKepler) {
  OrbitSpec o;
  EXPECT_NEAR(o.period_s(), oracle::period_500km(), 1e-9);
  EXPECT_NEAR(o.period_s(), 5676.98, 0.01);
}

TEST(Orbit, PeriodicAndAntipodal) {
  OrbitSpec o;
  o.inclination_deg = 97.4;
  o.raan_deg = 33.0;
  o.arg_lat_epoch_deg = 12.0;
  const double T = o.period_s();
  for (double t : {0.0, 100.0, 4321.5}) {
    const auto a = propagate(o, t);
    const auto b = propagate(o, t + T);
    EXPECT_LT((a.position - b.position).norm(), 1e-6);
    const auto c = propagate(o, t + T / 2);
    EXPECT_NEAR(a.position.normalized().dot(c.position.normalized()), -1.0, 1e-9);
  }
}

TEST(Orbit, CircularInvariants) {
  OrbitSpec o;
  const double a = o.semi_major_axis_km();
  for (double t = 0; t < 20000; t += 777.7) {
    const auto s = propagate(o, t);
    EXPECT_NEAR(s.position.norm() / a, 1.0, 1e-6);
    EXPECT_NEAR(s.position.dot(s.velocity) / (s.position.norm() * s.velocity.norm()), 0.0, 1e-9);
    EXPECT_DOUBLE_EQ(s.t, t);
  }
}

TEST(Orbit, RejectsBadElements) {
  OrbitSpec o;
  o.altitude_km = 0.0;
  EXPECT_THROW(o.check(), std::invalid_argument);
  o = OrbitSpec{};
  o.inclination_deg = 181.0;
  EXPECT_THROW(o.check(), std::invalid_argument);
  o = OrbitSpec{};
  o.raan_deg = -30.0;
  o.arg_lat_epoch_deg = 725.0;
  const auto n = o.normalized();
  EXPECT_NEAR(n.raan_deg, 330.0, 1e-12);
  EXPECT_NEAR(n.arg_lat_epoch_deg, 5.0, 1e-12);
}

TEST(GeoPointTest, Ranges) {
  EXPECT_THROW((GeoPoint{91.0, 0.0}).check(), std::invalid_argument);
  EXPECT_THROW((GeoPoint{0.0, 180.0}).check(), std::invalid_argument);
  EXPECT_NO_THROW((GeoPoint{-90.0, -180.0}).check());
}

TEST(Elevation, ZenithAndOccluded) {
  OrbitSpec o;
  const auto s = propagate(o, 0.0);  // over lat 0, lon 0 at t = 0
  EXPECT_NEAR(elevation_angle(s, {0.0, 0.0}, 0.0), 90.0, 1e-9);
  EXPECT_LT(elevation_angle(s, {0.0, -179.0}, 0.0), 0.0);
}

TEST(Elevation, MatchesIndependentGeometry) {
  OrbitSpec o;
  o.inclination_deg = 51.6;
  o.raan_deg = 40.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lat(-80, 80), lon(-180, 179.9), t(0, 86400);
  for (int i = 0; i < 200; ++i) {
    const double tt = t(rng);
    const GeoPoint g{lat(rng), lon(rng)};
    const auto s = propagate(o, tt);
    EXPECT_NEAR(elevation_angle(s, g, tt), elevation_ref(s.position, site_inertial(g.lat_deg, g.lon_deg, tt)), 1e-9);
  }
}

TEST(Elevation, PolarOrbitPassesOverPole) {
  OrbitSpec o;
  double best = -90.0;
  for (double t = 0; t <= o.period_s(); t += 1.0) best = std::max(best, elevation_angle(propagate(o, t), {90.0, 0.0}, t));
  EXPECT_GT(best, 89.5);
}

TEST(OffNadir, NadirLimbAndBeyond) {
  OrbitSpec o;
  const auto s = propagate(o, 0.0);
  EXPECT_NEAR(off_nadir_angle(s, {0.0, 0.0}, 0.0), 0.0, 1e-9);

  // Limb tangent point: central angle acos(R/r) along the equator.
  const double lambda = std::acos(kR / 6878.137) * 180.0 / oracle::kPi;
  EXPECT_NEAR(off_nadir_angle(s, {0.0, lambda}, 0.0), oracle::limb_off_nadir_500km(), 1e-6);
  EXPECT_NEAR(oracle::limb_off_nadir_500km(), 68.02, 0.01);

  // 90 deg of arc away the line of sight passes through the Earth: off-nadir is atan(R/r) and the
  // target is below the horizon.
  EXPECT_NEAR(off_nadir_angle(s, {0.0, 90.0}, 0.0), std::atan(kR / 6878.137) * 180.0 / oracle::kPi, 1e-9);
  EXPECT_LT(elevation_angle(s, {0.0, 90.0}, 0.0), 0.0);
}

TEST(OffNadir, ContinuousOnPass) {
  OrbitSpec o;
  const GeoPoint g{10.0, 2.0};
  double worst = 0.0;
  for (double t = 0; t < 600; t += 1.0) {
    const double a = off_nadir_angle(propagate(o, t), g, t);
    const double b = off_nadir_angle(propagate(o, t + 0.1), g, t + 0.1);
    worst = std::max(worst, std::abs(b - a));
  }
  EXPECT_LT(worst, 0.5);  // < 5 deg/s
}

TEST(Pointing, UnitDirection) {
  OrbitSpec o;
  const auto p = pointing_to(propagate(o, 123.0), {5.0, 5.0});
  EXPECT_NEAR(p.direction.norm(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(p.t, 123.0);
}

TEST(Slew, Examples) {
  const Vec3 x = Vec3::UnitX();
  const Vec3 y30(std::cos(oracle::kPi / 6), std::sin(oracle::kPi / 6), 0.0);
  EXPECT_TRUE(slew_feasible({x, 0.0}, {y30, 30.0}, 1.0));
  EXPECT_FALSE(slew_feasible({x, 0.0}, {y30, 29.0}, 1.0));
  EXPECT_TRUE(slew_feasible({x, 5.0}, {x, 5.0}, 1.0));
  EXPECT_FALSE(slew_feasible({x, 5.0}, {x, 4.0}, 1.0));
}

TEST(Slew, MonotoneInGap) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) {
    const Vec3 a = Vec3(n(rng), n(rng), n(rng)).normalized();
    const Vec3 b = Vec3(n(rng), n(rng), n(rng)).normalized();
    bool seen = false;
    for (double gap = 0; gap < 200; gap += 0.5) {
      const bool ok = slew_feasible({a, 0.0}, {b, gap}, 1.0);
      if (seen) EXPECT_TRUE(ok);
      seen = seen || ok;
    }
    EXPECT_TRUE(seen);
  }
}

TEST(Angles, SmallAndNearAntipodal) {
  const Vec3 a = Vec3::UnitX();
  const Vec3 tiny(1.0, 1e-9, 0.0);
  EXPECT_NEAR(angle_between_deg(a, tiny), 1e-9 * 180.0 / oracle::kPi, 1e-15);
  EXPECT_NEAR(angle_between_deg(a, -a), 180.0, 1e-12);
  EXPECT_NEAR(wrap_360(-1.0), 359.0, 1e-12);
  EXPECT_NEAR(wrap_360(720.0), 0.0, 1e-12);
}

TEST(Geometry, CentralAngleBound) {
  // Sine rule in the Earth-centre / satellite / target triangle: r sin(eta) = R cos(elev).
  const double r = 6878.137;
  const double eta = 60.0 * oracle::kPi / 180.0;
  const double elev = std::acos(r * std::sin(eta) / kR);
  EXPECT_NEAR(max_central_angle_deg(500.0, 60.0), 90.0 - 60.0 - elev * 180.0 / oracle::kPi, 1e-9);
  // Beyond the limb the horizon bounds the region.
  EXPECT_NEAR(max_central_angle_deg(500.0, 80.0), std::acos(kR / r) * 180.0 / oracle::kPi, 1e-9);
}

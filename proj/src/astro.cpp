#include "orbitsched/astro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

namespace orbitsched {

using namespace constants;

double OrbitSpec::mean_motion() const {
  const double a = semi_major_axis_km();
  return std::sqrt(kMuEarth / (a * a * a));
}

double OrbitSpec::period_s() const { return 2.0 * kPi / mean_motion(); }

void OrbitSpec::check() const {
  if (!(altitude_km > 0.0) || !std::isfinite(altitude_km)) {
    throw std::invalid_argument("orbit altitude_km must be positive, got " + std::to_string(altitude_km));
  }
  if (!(inclination_deg >= 0.0 && inclination_deg <= 180.0)) {
    throw std::invalid_argument("orbit inclination_deg must lie in [0, 180], got " +
                                std::to_string(inclination_deg));
  }
  if (!std::isfinite(raan_deg) || !std::isfinite(arg_lat_epoch_deg) || !std::isfinite(epoch)) {
    throw std::invalid_argument("orbit angles and epoch must be finite");
  }
}

OrbitSpec OrbitSpec::normalized() const {
  OrbitSpec o = *this;
  o.raan_deg = wrap_360(raan_deg);
  o.arg_lat_epoch_deg = wrap_360(arg_lat_epoch_deg);
  return o;
}

void GeoPoint::check() const {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0)) {
    throw std::invalid_argument("latitude must lie in [-90, 90], got " + std::to_string(lat_deg));
  }
  if (!(lon_deg >= -180.0 && lon_deg < 180.0)) {
    throw std::invalid_argument("longitude must lie in [-180, 180), got " + std::to_string(lon_deg));
  }
  if (!std::isfinite(alt_m)) throw std::invalid_argument("site altitude must be finite");
}

double wrap_360(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

EciState propagate(const OrbitSpec& orbit, double t) {
  const double a = orbit.semi_major_axis_km();
  const double n = orbit.mean_motion();
  const double raan = orbit.raan_deg * kDegToRad;
  const double inc = orbit.inclination_deg * kDegToRad;
  const double u = orbit.arg_lat_epoch_deg * kDegToRad + n * (t - orbit.epoch);

  // In-plane basis: p toward the ascending node, q 90 degrees ahead along the orbit.
  const Vec3 p(std::cos(raan), std::sin(raan), 0.0);
  const Vec3 q(-std::cos(inc) * std::sin(raan), std::cos(inc) * std::cos(raan), std::sin(inc));

  EciState s;
  s.t = t;
  s.position = a * (std::cos(u) * p + std::sin(u) * q);
  s.velocity = a * n * (-std::sin(u) * p + std::cos(u) * q);
  return s;
}

Vec3 site_ecef(const GeoPoint& site) {
  const double r = kEarthRadiusKm + site.alt_m / 1000.0;
  const double lat = site.lat_deg * kDegToRad;
  const double lon = site.lon_deg * kDegToRad;
  return r * Vec3(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
}

Vec3 site_eci(const GeoPoint& site, double t) {
  return Eigen::AngleAxisd(kEarthRotationRate * t, Vec3::UnitZ()) * site_ecef(site);
}

Vec3 eci_to_ecef(const Vec3& v, double t) {
  return Eigen::AngleAxisd(-kEarthRotationRate * t, Vec3::UnitZ()) * v;
}

double angle_between_deg(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b)) * kRadToDeg;
}

double elevation_angle(const EciState& sat, const GeoPoint& site, double t) {
  const Vec3 r_site = site_eci(site, t);
  const Vec3 rho = sat.position - r_site;
  const double s = std::clamp(rho.dot(r_site.normalized()) / rho.norm(), -1.0, 1.0);
  return std::asin(s) * kRadToDeg;
}

double off_nadir_angle(const EciState& sat, const GeoPoint& target, double t) {
  const Vec3 los = site_eci(target, t) - sat.position;
  return angle_between_deg(-sat.position, los);
}

PointingVector pointing_to(const EciState& sat, const GeoPoint& target) {
  return {(site_eci(target, sat.t) - sat.position).normalized(), sat.t};
}

bool slew_feasible(const PointingVector& from, const PointingVector& to, double slew_rate_deg_s) {
  const double gap = to.t - from.t;
  if (gap < 0.0) return false;
  const double angle = angle_between_deg(from.direction, to.direction);
  // 1e-9 s absorbs round-off in the angle for boundary cases such as 30 deg in 30 s at 1 deg/s.
  return angle / slew_rate_deg_s <= gap + 1e-9;
}

double max_central_angle_deg(double altitude_km, double max_off_nadir_deg) {
  const double ratio = (kEarthRadiusKm + altitude_km) / kEarthRadiusKm;
  const double s = ratio * std::sin(max_off_nadir_deg * kDegToRad);
  if (s >= 1.0) {
    // Cone reaches past the limb: the horizon bounds the visible region.
    return std::acos(1.0 / ratio) * kRadToDeg;
  }
  const double elevation = std::acos(s) * kRadToDeg;
  return 90.0 - max_off_nadir_deg - elevation;
}

}  // namespace orbitsched

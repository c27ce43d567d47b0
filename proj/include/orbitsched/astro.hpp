// Two-body circular-orbit propagation and access geometry.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace orbitsched {

using Vec3 = Eigen::Vector3d;

namespace constants {
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;
/// Earth gravitational parameter [km^3/s^2].
inline constexpr double kMuEarth = 398600.4418;
/// Spherical Earth radius [km].
inline constexpr double kEarthRadiusKm = 6378.137;
/// Sidereal rotation rate [rad/s].
inline constexpr double kEarthRotationRate = 7.2921159e-5;
}  // namespace constants

struct OrbitSpec {
  double altitude_km = 500.0;
  double inclination_deg = 90.0;
  double raan_deg = 0.0;
  double arg_lat_epoch_deg = 0.0;
  double epoch = 0.0;

  double semi_major_axis_km() const { return constants::kEarthRadiusKm + altitude_km; }
  double mean_motion() const;  // [rad/s]
  double period_s() const;

  /// Throws std::invalid_argument on altitude <= 0 or inclination outside [0, 180].
  void check() const;
  /// Copy with raan and argument of latitude wrapped into [0, 360).
  OrbitSpec normalized() const;

  bool operator==(const OrbitSpec&) const = default;
};

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_m = 0.0;

  void check() const;
  bool operator==(const GeoPoint&) const = default;
};

struct EciState {
  Vec3 position = Vec3::Zero();  // [km]
  Vec3 velocity = Vec3::Zero();  // [km/s]
  double t = 0.0;
};

struct PointingVector {
  Vec3 direction = Vec3::UnitZ();  // unit, inertial
  double t = 0.0;

  bool operator==(const PointingVector& o) const {
    return direction == o.direction && t == o.t;
  }
};

/// Wraps an angle in degrees into [0, 360).
double wrap_360(double deg);

EciState propagate(const OrbitSpec& orbit, double t);

/// Earth-fixed position of a site [km] (spherical Earth).
Vec3 site_ecef(const GeoPoint& site);
/// Inertial position of a site at time t; the Earth-fixed and inertial frames coincide at t = 0.
Vec3 site_eci(const GeoPoint& site, double t);
/// Rotates an inertial vector into the Earth-fixed frame at time t.
Vec3 eci_to_ecef(const Vec3& v, double t);

/// Elevation of the satellite above the site's local horizon [deg], in [-90, 90].
double elevation_angle(const EciState& sat, const GeoPoint& site, double t);

/// Angle between nadir and the satellite-to-target line [deg], in [0, 180].
double off_nadir_angle(const EciState& sat, const GeoPoint& target, double t);

/// Unit line-of-sight from satellite to target at the satellite state's time.
PointingVector pointing_to(const EciState& sat, const GeoPoint& target);

/// Angle between two directions [deg]; well conditioned near 0 and 180.
double angle_between_deg(const Vec3& a, const Vec3& b);

/// True iff a single eigen-axis slew at the given rate fits inside the time gap.
/// A negative gap is never feasible.
bool slew_feasible(const PointingVector& from, const PointingVector& to, double slew_rate_deg_s);

/// Largest Earth-central angle [deg] between sub-satellite point and a visible target whose
/// off-nadir angle does not exceed max_off_nadir_deg.
double max_central_angle_deg(double altitude_km, double max_off_nadir_deg);

}  // namespace orbitsched

// Problem-instance data model and opportunity-window computation.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "orbitsched/astro.hpp"

namespace orbitsched {

enum class Mode : std::uint8_t { kCollect = 0, kContact = 1, kSunpoint = 2 };

std::string_view to_string(Mode mode);
/// Throws std::invalid_argument for anything other than "collect", "contact", "sunpoint".
Mode mode_from_string(std::string_view name);

inline constexpr double kDefaultCollectDurationS = 30.0;
inline constexpr double kDefaultMaxOffNadirDeg = 60.0;
inline constexpr double kDefaultMinElevationDeg = 5.0;

struct ImageRequest {
  std::string id;
  GeoPoint point;
  double reward = 1.0;
  double duration_s = kDefaultCollectDurationS;
  double max_off_nadir_deg = kDefaultMaxOffNadirDeg;

  void check() const;
  bool operator==(const ImageRequest&) const = default;
};

struct GroundStation {
  std::string id;
  GeoPoint point;
  double min_elevation_deg = kDefaultMinElevationDeg;

  void check() const;
  bool operator==(const GroundStation&) const = default;
};

/// Signed per-second rates for each action mode, as fractions of capacity.
struct ModeRates {
  double collect = 0.0;
  double contact = 0.0;
  double sunpoint = 0.0;

  double operator[](Mode mode) const {
    switch (mode) {
      case Mode::kCollect: return collect;
      case Mode::kContact: return contact;
      case Mode::kSunpoint: return sunpoint;
    }
    return 0.0;
  }
  bool operator==(const ModeRates&) const = default;
};

inline constexpr double kTelemetryDataRate = 1e-6;
inline constexpr double kImageDataFraction = 0.01;
inline constexpr double kCollectDataRate = kImageDataFraction / kDefaultCollectDurationS + kTelemetryDataRate;
inline constexpr double kContactDataRate =
    -4.0 * kImageDataFraction / kDefaultCollectDurationS + kTelemetryDataRate;

struct SpacecraftConfig {
  double slew_rate_deg_s = 1.0;
  ModeRates power_rates{-5e-4, -5e-4, 2e-4};
  ModeRates data_rates{kCollectDataRate, kContactDataRate, kTelemetryDataRate};
  double p_min = 0.30;
  double d_max = 0.75;
  double p0 = 1.0;
  double d0 = 0.0;

  /// 1 deg/s slew, one image = 1% of storage over a default-length collect, 1e-6/s telemetry in
  /// every mode, downlink at four times the imaging data rate, p_min 30%, d_max 75%.
  static SpacecraftConfig defaults();

  /// Enforces the sign pattern of the per-mode resource rates and the threshold ordering.
  void check() const;
  bool operator==(const SpacecraftConfig&) const = default;
};

struct Opportunity {
  int id = 0;
  Mode mode = Mode::kSunpoint;
  /// Index into Scenario::requests (collect) or Scenario::stations (contact); -1 for sunpoint.
  int location = -1;
  double t_s = 0.0;
  double t_e = 0.0;
  double reward = 0.0;
  PointingVector pointing_start;
  PointingVector pointing_end;

  bool occupies_pointing() const { return mode != Mode::kSunpoint; }
  bool operator==(const Opportunity&) const = default;
};

/// Immutable problem instance. Opportunities are optional until computed.
class Scenario {
 public:
  OrbitSpec orbit;
  SpacecraftConfig spacecraft = SpacecraftConfig::defaults();
  std::vector<ImageRequest> requests;
  std::vector<GroundStation> stations;
  double horizon_s = 86400.0;

  /// Validates every field; throws std::invalid_argument naming the offending item.
  void check() const;

  /// Sorts by (t_s, id), validates against the scenario and links sunpoint twins.
  void set_opportunities(std::vector<Opportunity> opportunities);
  void clear_opportunities();
  bool has_opportunities() const { return opportunities_.has_value(); }
  /// Throws std::logic_error when opportunities have not been computed or loaded.
  const std::vector<Opportunity>& opportunities() const;

  std::optional<std::size_t> find_opportunity(int id) const;
  /// Index of the sunpoint sharing (t_s, t_e) with the collect/contact at `index`; -1 if none.
  int twin_of(std::size_t index) const { return twin_[index]; }

  bool operator==(const Scenario& other) const;

 private:
  std::optional<std::vector<Opportunity>> opportunities_;
  std::vector<int> twin_;
  std::unordered_map<int, std::size_t> by_id_;
};

/// Uniform points with latitude in [-70, 70] and longitude in [-180, 180); deterministic per seed.
std::vector<GeoPoint> sample_locations(std::size_t n, std::uint64_t seed);

/// One request per point, ids "img-0000", "img-0001", ...
std::vector<ImageRequest> make_requests(const std::vector<GeoPoint>& points);

/// A small polar ground network: Svalbard, Fairbanks, Troll.
std::vector<GroundStation> default_stations();

/// Scenario with default 500 km polar orbit and spacecraft, no opportunities.
Scenario make_scenario(std::size_t n_locations, std::uint64_t seed, double horizon_s);

struct AccessOptions {
  double sweep_step_s = 1.0;
  double refine_tolerance_s = 0.01;
};

/// Collect windows (off-nadir within the request's cone, target above the horizon), contact
/// windows (elevation at or above the station mask) and a sunpoint twin for each, sorted by t_s.
std::vector<Opportunity> compute_opportunities(const Scenario& scenario, const AccessOptions& options = {});

/// Copy of the scenario with opportunities computed.
Scenario with_opportunities(Scenario scenario, const AccessOptions& options = {});

/// Hand-shaped instances that bypass orbital geometry, for tests and small benchmarks.
struct SyntheticSpec {
  std::size_t n_collects = 8;
  std::size_t n_images = 8;  // collects are spread round-robin, then shuffled, across images
  std::size_t n_contacts = 0;
  double span_s = 600.0;
  double min_duration_s = 10.0;
  double max_duration_s = 40.0;
  double max_pointing_offset_deg = 45.0;  // half-angle of the cone pointing directions are drawn from
  int max_reward = 1;                     // rewards are uniform integers in [1, max_reward]
};

Scenario make_synthetic_scenario(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace orbitsched

#include "orbitsched/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>

namespace orbitsched {

using namespace constants;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kCollect: return "collect";
    case Mode::kContact: return "contact";
    case Mode::kSunpoint: return "sunpoint";
  }
  return "unknown";
}

Mode mode_from_string(std::string_view name) {
  if (name == "collect") return Mode::kCollect;
  if (name == "contact") return Mode::kContact;
  if (name == "sunpoint") return Mode::kSunpoint;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected collect, contact or sunpoint)");
}

void ImageRequest::check() const {
  const std::string who = "request '" + id + "': ";
  try {
    point.check();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(who + e.what());
  }
  if (!(reward >= 0.0)) throw std::invalid_argument(who + "reward must be >= 0");
  if (!(duration_s > 0.0)) throw std::invalid_argument(who + "duration_s must be > 0");
  if (!(max_off_nadir_deg > 0.0 && max_off_nadir_deg < 90.0)) {
    throw std::invalid_argument(who + "max_off_nadir_deg must lie in (0, 90)");
  }
}

void GroundStation::check() const {
  const std::string who = "station '" + id + "': ";
  try {
    point.check();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(who + e.what());
  }
  if (!(min_elevation_deg >= 0.0 && min_elevation_deg < 90.0)) {
    throw std::invalid_argument(who + "min_elevation_deg must lie in [0, 90)");
  }
}

SpacecraftConfig SpacecraftConfig::defaults() { return {}; }

void SpacecraftConfig::check() const {
  if (!(slew_rate_deg_s > 0.0)) throw std::invalid_argument("spacecraft slew_rate_deg_s must be > 0");
  if (!(power_rates.collect < 0.0 && power_rates.contact < 0.0 && power_rates.sunpoint >= 0.0)) {
    throw std::invalid_argument("spacecraft power rates must satisfy collect < 0, contact < 0, sunpoint >= 0");
  }
  if (!(data_rates.collect > 0.0 && data_rates.contact < 0.0 && data_rates.sunpoint > 0.0)) {
    throw std::invalid_argument("spacecraft data rates must satisfy collect > 0, contact < 0, sunpoint > 0");
  }
  if (!(0.0 <= p_min && p_min < p0 && p0 <= 1.0)) {
    throw std::invalid_argument("spacecraft power thresholds must satisfy 0 <= p_min < p0 <= 1");
  }
  if (!(0.0 <= d0 && d0 < d_max && d_max <= 1.0)) {
    throw std::invalid_argument("spacecraft data thresholds must satisfy 0 <= d0 < d_max <= 1");
  }
}

void Scenario::check() const {
  orbit.check();
  spacecraft.check();
  if (!(horizon_s > 0.0) || !std::isfinite(horizon_s)) throw std::invalid_argument("horizon_s must be > 0");
  std::unordered_map<std::string, int> seen;
  for (const auto& r : requests) {
    r.check();
    if (seen[r.id]++) throw std::invalid_argument("duplicate request id '" + r.id + "'");
  }
  seen.clear();
  for (const auto& g : stations) {
    g.check();
    if (seen[g.id]++) throw std::invalid_argument("duplicate station id '" + g.id + "'");
  }
}

namespace {

std::string opp_label(const Opportunity& o) { return "opportunity " + std::to_string(o.id); }

void check_pointing(const Opportunity& o, const PointingVector& p, const char* which) {
  if (std::abs(p.direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument(opp_label(o) + ": " + which + " direction is not a unit vector");
  }
}

}  // namespace

void Scenario::set_opportunities(std::vector<Opportunity> opps) {
  std::unordered_map<int, std::size_t> by_id;
  for (const auto& o : opps) {
    if (!(o.t_s < o.t_e)) {
      throw std::invalid_argument(opp_label(o) + ": t_s (" + std::to_string(o.t_s) + ") must be < t_e (" +
                                  std::to_string(o.t_e) + ")");
    }
    if (o.t_s < 0.0 || o.t_e > horizon_s) {
      throw std::invalid_argument(opp_label(o) + ": window lies outside [0, horizon_s]");
    }
    if (!(o.reward >= 0.0)) throw std::invalid_argument(opp_label(o) + ": reward must be >= 0");
    switch (o.mode) {
      case Mode::kSunpoint:
        if (o.location != -1) throw std::invalid_argument(opp_label(o) + ": sunpoint must not name a location");
        break;
      case Mode::kCollect:
        if (o.location < 0 || static_cast<std::size_t>(o.location) >= requests.size()) {
          throw std::invalid_argument(opp_label(o) + ": collect location does not resolve to a request");
        }
        break;
      case Mode::kContact:
        if (o.location < 0 || static_cast<std::size_t>(o.location) >= stations.size()) {
          throw std::invalid_argument(opp_label(o) + ": contact location does not resolve to a station");
        }
        break;
    }
    check_pointing(o, o.pointing_start, "pointing_start");
    check_pointing(o, o.pointing_end, "pointing_end");
    if (!by_id.emplace(o.id, 0).second) throw std::invalid_argument(opp_label(o) + ": duplicate id");
  }

  std::stable_sort(opps.begin(), opps.end(), [](const Opportunity& a, const Opportunity& b) {
    return std::tie(a.t_s, a.id) < std::tie(b.t_s, b.id);
  });
  for (std::size_t i = 0; i < opps.size(); ++i) by_id[opps[i].id] = i;

  // Pair each collect/contact with an unused sunpoint of identical (t_s, t_e), preferring id + 1.
  std::vector<int> twin(opps.size(), -1);
  std::map<std::pair<double, double>, std::vector<std::size_t>> sunpoints;
  for (std::size_t i = 0; i < opps.size(); ++i) {
    if (opps[i].mode == Mode::kSunpoint) sunpoints[{opps[i].t_s, opps[i].t_e}].push_back(i);
  }
  for (std::size_t i = 0; i < opps.size(); ++i) {
    if (opps[i].mode == Mode::kSunpoint) continue;
    auto it = sunpoints.find({opps[i].t_s, opps[i].t_e});
    if (it == sunpoints.end() || it->second.empty()) continue;
    auto& pool = it->second;
    auto pick = std::find_if(pool.begin(), pool.end(), [&](std::size_t j) { return opps[j].id == opps[i].id + 1; });
    if (pick == pool.end()) pick = pool.begin();
    twin[i] = static_cast<int>(*pick);
    twin[*pick] = static_cast<int>(i);
    pool.erase(pick);
  }

  opportunities_ = std::move(opps);
  twin_ = std::move(twin);
  by_id_ = std::move(by_id);
}

void Scenario::clear_opportunities() {
  opportunities_.reset();
  twin_.clear();
  by_id_.clear();
}

const std::vector<Opportunity>& Scenario::opportunities() const {
  if (!opportunities_) throw std::logic_error("scenario has no opportunities; compute them first");
  return *opportunities_;
}

std::optional<std::size_t> Scenario::find_opportunity(int id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

bool Scenario::operator==(const Scenario& other) const {
  return orbit == other.orbit && spacecraft == other.spacecraft && requests == other.requests &&
         stations == other.stations && horizon_s == other.horizon_s && opportunities_ == other.opportunities_;
}

std::vector<GeoPoint> sample_locations(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(-70.0, 70.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  std::vector<GeoPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    GeoPoint p;
    p.lat_deg = lat(rng);
    p.lon_deg = lon(rng);
    if (p.lon_deg >= 180.0) p.lon_deg = -180.0;
    out.push_back(p);
  }
  return out;
}

std::vector<ImageRequest> make_requests(const std::vector<GeoPoint>& points) {
  std::vector<ImageRequest> out;
  out.reserve(points.size());
  char buf[32];
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "img-%04zu", i);
    ImageRequest r;
    r.id = buf;
    r.point = points[i];
    out.push_back(r);
  }
  return out;
}

std::vector<GroundStation> default_stations() {
  return {
      {"svalbard", {78.2297, 15.4078, 0.0}, kDefaultMinElevationDeg},
      {"fairbanks", {64.8594, -147.8497, 0.0}, kDefaultMinElevationDeg},
      {"troll", {-72.0117, 2.5350, 0.0}, kDefaultMinElevationDeg},
  };
}

Scenario make_scenario(std::size_t n_locations, std::uint64_t seed, double horizon_s) {
  Scenario s;
  s.requests = make_requests(sample_locations(n_locations, seed));
  s.stations = default_stations();
  s.horizon_s = horizon_s;
  return s;
}

// ---------------------------------------------------------------------------------------------
// Access windows

namespace {

struct RawWindow {
  Mode mode;
  int location;
  double t_s;
  double t_e;
};

/// Central angle bound [deg] for a site seen at or above `min_elevation_deg`.
double central_angle_for_elevation(double altitude_km, double min_elevation_deg) {
  const double ratio = kEarthRadiusKm / (kEarthRadiusKm + altitude_km);
  const double eta = std::asin(ratio * std::cos(min_elevation_deg * kDegToRad)) * kRadToDeg;
  return 90.0 - eta - min_elevation_deg;
}

class AccessSweep {
 public:
  AccessSweep(const Scenario& sc, const AccessOptions& opt) : sc_(sc), opt_(opt) {
    const double step = opt.sweep_step_s;
    const auto n = static_cast<std::size_t>(std::floor(sc.horizon_s / step));
    times_.reserve(n + 2);
    for (std::size_t k = 0; k <= n; ++k) times_.push_back(static_cast<double>(k) * step);
    if (times_.back() < sc.horizon_s) times_.push_back(sc.horizon_s);
    sat_ecef_.reserve(times_.size());
    sat_unit_.reserve(times_.size());
    for (double t : times_) {
      sat_ecef_.push_back(sat_ecef(t));
      sat_unit_.push_back(sat_ecef_.back().normalized());
    }
    // Upper bound on how fast the sub-satellite point moves relative to any Earth-fixed site.
    max_rate_deg_s_ = (sc.orbit.mean_motion() + kEarthRotationRate) * kRadToDeg;
  }

  Vec3 sat_ecef(double t) const { return eci_to_ecef(propagate(sc_.orbit, t).position, t); }

  /// Maximal runs of the predicate over the sweep grid, endpoints refined by bisection.
  template <typename Pred>
  void windows(const Vec3& site_unit, double lambda_max_deg, Pred&& pred_at, Mode mode, int location,
               std::vector<RawWindow>& out) const {
    const double cos_gate = std::cos(std::min(180.0, lambda_max_deg + 1.0) * kDegToRad);
    const std::size_t n = times_.size();
    auto sample = [&](std::size_t k, std::size_t* skip) {
      const double c = std::clamp(sat_unit_[k].dot(site_unit), -1.0, 1.0);
      if (c >= cos_gate) {
        *skip = 1;
        return pred_at(sat_ecef_[k]);
      }
      const double excess = std::acos(c) * kRadToDeg - (lambda_max_deg + 1.0);
      const double span = excess / max_rate_deg_s_;
      *skip = std::max<std::size_t>(1, static_cast<std::size_t>(span / opt_.sweep_step_s));
      return false;
    };

    std::size_t k = 0;
    bool in_run = false;
    std::size_t run_start = 0;
    std::size_t last_true = 0;
    while (k < n) {
      std::size_t skip = 1;
      const bool inside = sample(k, &skip);
      if (inside) {
        if (!in_run) {
          in_run = true;
          run_start = k;
        }
        last_true = k;
      } else if (in_run) {
        emit(run_start, last_true, pred_at, mode, location, out);
        in_run = false;
      }
      // Skipping is only taken from samples that are outside the gate, so runs are never split.
      k += inside ? 1 : skip;
    }
    if (in_run) emit(run_start, last_true, pred_at, mode, location, out);
  }

 private:
  template <typename Pred>
  void emit(std::size_t first, std::size_t last, Pred&& pred_at, Mode mode, int location,
            std::vector<RawWindow>& out) const {
    auto inside = [&](double t) { return pred_at(sat_ecef(t)); };
    // Invariant for both searches: `in` satisfies the predicate, `out_t` does not.
    auto refine = [&](double in, double out_t) {
      while (std::abs(out_t - in) > opt_.refine_tolerance_s) {
        const double mid = 0.5 * (in + out_t);
        (inside(mid) ? in : out_t) = mid;
      }
      return in;
    };
    const double t_s = first == 0 ? times_.front() : refine(times_[first], times_[first - 1]);
    const double t_e = last + 1 == times_.size() ? times_.back() : refine(times_[last], times_[last + 1]);
    if (t_s < t_e) out.push_back({mode, location, t_s, t_e});
  }

  const Scenario& sc_;
  AccessOptions opt_;
  std::vector<double> times_;
  std::vector<Vec3> sat_ecef_;
  std::vector<Vec3> sat_unit_;
  double max_rate_deg_s_ = 0.0;
};

}  // namespace

std::vector<Opportunity> compute_opportunities(const Scenario& sc, const AccessOptions& opt) {
  sc.check();
  if (!(opt.sweep_step_s > 0.0) || !(opt.refine_tolerance_s > 0.0)) {
    throw std::invalid_argument("access sweep step and refine tolerance must be positive");
  }
  AccessSweep sweep(sc, opt);
  std::vector<RawWindow> raw;

  for (std::size_t i = 0; i < sc.requests.size(); ++i) {
    const auto& req = sc.requests[i];
    const Vec3 site = site_ecef(req.point);
    const Vec3 up = site.normalized();
    const double cos_cone = std::cos(req.max_off_nadir_deg * kDegToRad);
    // Off-nadir within the cone and target in front of the limb (positive elevation).
    auto pred = [&](const Vec3& sat) {
      const Vec3 los = site - sat;
      const double range = los.norm();
      if ((-sat).dot(los) < cos_cone * sat.norm() * range) return false;
      return (-los).dot(up) > 0.0;
    };
    sweep.windows(up, max_central_angle_deg(sc.orbit.altitude_km, req.max_off_nadir_deg), pred, Mode::kCollect,
                  static_cast<int>(i), raw);
  }
  for (std::size_t g = 0; g < sc.stations.size(); ++g) {
    const auto& st = sc.stations[g];
    const Vec3 site = site_ecef(st.point);
    const Vec3 up = site.normalized();
    const double sin_mask = std::sin(st.min_elevation_deg * kDegToRad);
    auto pred = [&](const Vec3& sat) {
      const Vec3 rho = sat - site;
      return rho.dot(up) >= sin_mask * rho.norm();
    };
    sweep.windows(up, central_angle_for_elevation(sc.orbit.altitude_km, st.min_elevation_deg), pred, Mode::kContact,
                  static_cast<int>(g), raw);
  }

  std::sort(raw.begin(), raw.end(), [](const RawWindow& a, const RawWindow& b) {
    return std::tie(a.t_s, a.mode, a.location) < std::tie(b.t_s, b.mode, b.location);
  });

  std::vector<Opportunity> out;
  out.reserve(2 * raw.size());
  int next_id = 0;
  for (const auto& w : raw) {
    Opportunity o;
    o.id = next_id;
    o.mode = w.mode;
    o.location = w.location;
    o.t_s = w.t_s;
    o.t_e = w.t_e;
    const GeoPoint* target = nullptr;
    if (w.mode == Mode::kCollect) {
      const auto& req = sc.requests[static_cast<std::size_t>(w.location)];
      o.t_e = std::min(w.t_e, w.t_s + req.duration_s);
      o.reward = req.reward;
      target = &req.point;
    } else {
      target = &sc.stations[static_cast<std::size_t>(w.location)].point;
    }
    o.pointing_start = pointing_to(propagate(sc.orbit, o.t_s), *target);
    o.pointing_end = pointing_to(propagate(sc.orbit, o.t_e), *target);

    Opportunity twin = o;
    twin.id = next_id + 1;
    twin.mode = Mode::kSunpoint;
    twin.location = -1;
    twin.reward = 0.0;
    out.push_back(o);
    out.push_back(twin);
    next_id += 2;
  }
  return out;
}

Scenario with_opportunities(Scenario scenario, const AccessOptions& options) {
  auto opps = compute_opportunities(scenario, options);
  scenario.set_opportunities(std::move(opps));
  return scenario;
}

// ---------------------------------------------------------------------------------------------
// Synthetic instances

namespace {

Vec3 random_direction_in_cone(std::mt19937_64& rng, const Vec3& axis, double half_angle_deg) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double cos_max = std::cos(half_angle_deg * kDegToRad);
  const double cos_t = 1.0 - u01(rng) * (1.0 - cos_max);
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double phi = 2.0 * kPi * u01(rng);
  const Vec3 a = axis.normalized();
  const Vec3 helper = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = a.cross(helper).normalized();
  const Vec3 e2 = a.cross(e1);
  return (cos_t * a + sin_t * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized();
}

}  // namespace

Scenario make_synthetic_scenario(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n_collects > 0 && spec.n_images == 0) throw std::invalid_argument("synthetic: n_images must be > 0");
  if (spec.max_reward < 1) throw std::invalid_argument("synthetic: max_reward must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> start(1.0, std::max(1.0 + 1e-9, spec.span_s));
  std::uniform_real_distribution<double> duration(spec.min_duration_s, spec.max_duration_s);
  std::uniform_int_distribution<int> reward(1, spec.max_reward);

  Scenario sc;
  const auto points = sample_locations(spec.n_images, seed ^ 0x5bd1e995ULL);
  sc.requests = make_requests(points);
  for (auto& r : sc.requests) r.reward = reward(rng);
  if (spec.n_contacts > 0) sc.stations = {default_stations().front()};
  sc.horizon_s = spec.span_s + 4.0 * spec.max_duration_s + 10.0;

  std::vector<int> image_of(spec.n_collects);
  for (std::size_t i = 0; i < spec.n_collects; ++i) image_of[i] = static_cast<int>(i % std::max<std::size_t>(1, spec.n_images));
  std::shuffle(image_of.begin(), image_of.end(), rng);

  const Vec3 nadir = -Vec3::UnitZ();
  // Line-of-sight drift during a window stays below 0.5 deg/s, as for a 500 km pass.
  auto make_window = [&](Mode mode, int location, double dur) {
    Opportunity o;
    o.mode = mode;
    o.location = location;
    o.t_s = start(rng);
    o.t_e = o.t_s + dur;
    o.pointing_start = {random_direction_in_cone(rng, nadir, spec.max_pointing_offset_deg), o.t_s};
    const double drift = std::uniform_real_distribution<double>(0.0, 0.5)(rng) * dur;
    o.pointing_end = {random_direction_in_cone(rng, o.pointing_start.direction, drift), o.t_e};
    return o;
  };

  std::vector<Opportunity> raw;
  for (std::size_t i = 0; i < spec.n_collects; ++i) {
    auto o = make_window(Mode::kCollect, image_of[i], duration(rng));
    o.reward = sc.requests[static_cast<std::size_t>(o.location)].reward;
    raw.push_back(o);
  }
  for (std::size_t i = 0; i < spec.n_contacts; ++i) {
    raw.push_back(make_window(Mode::kContact, 0, 3.0 * duration(rng)));
  }
  std::sort(raw.begin(), raw.end(), [](const Opportunity& a, const Opportunity& b) { return a.t_s < b.t_s; });

  std::vector<Opportunity> opps;
  int next_id = 0;
  for (auto& o : raw) {
    o.id = next_id;
    Opportunity twin = o;
    twin.id = next_id + 1;
    twin.mode = Mode::kSunpoint;
    twin.location = -1;
    twin.reward = 0.0;
    opps.push_back(o);
    opps.push_back(twin);
    next_id += 2;
  }
  sc.set_opportunities(std::move(opps));
  return sc;
}

}  // namespace orbitsched

#include "orbitsched/validate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace orbitsched {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kOverlap: return "overlap";
    case ViolationKind::kSlew: return "slew";
    case ViolationKind::kPower: return "power";
    case ViolationKind::kData: return "data";
    case ViolationKind::kDuplicateCollect: return "duplicate-collect";
    case ViolationKind::kUnknownOpportunity: return "unknown-opportunity";
  }
  return "unknown";
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; }));
}

namespace {

// Chord form stays accurate for tiny and near-antipodal separations alike.
double separation_deg(const Vec3& a, const Vec3& b) {
  const double chord = (a.normalized() - b.normalized()).norm();
  return 2.0 * std::asin(std::min(1.0, chord / 2.0)) * 180.0 / constants::kPi;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

ValidationReport validate(const Plan& plan, const Scenario& scenario, const SmdpConfig& config) {
  ValidationReport rep;
  const auto& sc = scenario.spacecraft;
  const auto& opps = scenario.opportunities();

  double p = sc.p0;
  double d = sc.d0;
  double epoch = 0.0;       // start of the latest action
  double last_start = 0.0;  // start of the latest collect/contact
  const Opportunity* last_pointing = nullptr;
  std::vector<char> have(scenario.requests.size(), 0);

  rep.resource_trace.push_back({0.0, p, d});
  auto flag = [&rep](std::size_t k, ViolationKind kind, std::string detail) {
    rep.violations.push_back({k, kind, std::move(detail)});
  };

  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const SmdpAction& act = plan.steps[k].action;
    const double claimed = plan.steps[k].reward;
    rep.reported_reward += claimed;

    const auto found = scenario.find_opportunity(act.opportunity_id);
    if (!found) {
      flag(k, ViolationKind::kUnknownOpportunity, "opportunity id " + std::to_string(act.opportunity_id) + " not in scenario");
      continue;
    }
    const Opportunity& o = opps[*found];
    if (o.mode != act.mode || o.t_s != act.t_s || o.t_e != act.t_e || o.location != act.location) {
      flag(k, ViolationKind::kUnknownOpportunity,
           "opportunity " + std::to_string(o.id) + " does not match the recorded mode/time/location");
      continue;
    }

    if (!(o.t_s > epoch)) {
      flag(k, ViolationKind::kOverlap, "starts at " + fmt(o.t_s) + ", not after the previous epoch " + fmt(epoch));
    }
    const bool points = o.mode != Mode::kSunpoint;
    if (points && last_pointing) {
      const double from_t = config.agility_from_start ? last_pointing->t_s : last_pointing->t_e;
      const Vec3& from_dir =
          config.agility_from_start ? last_pointing->pointing_start.direction : last_pointing->pointing_end.direction;
      if (o.t_s < from_t) {
        flag(k, ViolationKind::kOverlap,
             "starts at " + fmt(o.t_s) + " before opportunity " + std::to_string(last_pointing->id) + " ends at " +
                 fmt(from_t));
      } else {
        const double need = separation_deg(from_dir, o.pointing_start.direction) / sc.slew_rate_deg_s;
        if (need > o.t_s - from_t + 1e-9) {
          flag(k, ViolationKind::kSlew,
               "slew needs " + fmt(need) + " s but only " + fmt(o.t_s - from_t) + " s are available");
        }
      }
    }

    // Resource levels before and after the action.
    const double p_before = p;
    const double d_before = d;
    if (config.resources_enabled) {
      const double dt = config.literal_resource_interval ? o.t_s - last_start : o.t_s - epoch;
      double p_rate = sc.power_rates.sunpoint;
      double d_rate = sc.data_rates.sunpoint;
      if (o.mode == Mode::kCollect) {
        p_rate = sc.power_rates.collect;
        d_rate = sc.data_rates.collect;
      } else if (o.mode == Mode::kContact) {
        p_rate = sc.power_rates.contact;
        d_rate = sc.data_rates.contact;
      }
      p = std::min(1.0, std::max(0.0, p + dt * p_rate));
      d = std::min(1.0, std::max(0.0, d + dt * d_rate));
    }

    double r = 0.0;
    if (o.mode == Mode::kCollect) {
      const auto img = static_cast<std::size_t>(o.location);
      const bool enough = !config.resources_enabled || (p_before > sc.p_min && d_before < sc.d_max);
      if (have[img]) {
        if (claimed > 1e-9 && o.reward > 0.0) {
          flag(k, ViolationKind::kDuplicateCollect,
               "image '" + scenario.requests[img].id + "' already collected; reward claimed again");
        }
      } else if (enough) {
        have[img] = 1;
        ++rep.images_collected;
        r += std::pow(config.gamma, o.t_s - epoch) * o.reward;
      }
    }
    const double span = config.literal_duration_reward ? o.t_s - epoch : o.t_e - o.t_s;
    if (o.mode == Mode::kContact) r += 0.1 * span;
    if (o.mode == Mode::kSunpoint) r += 1e-4 * span;
    if (config.resources_enabled) {
      if (p <= sc.p_min) {
        r -= 1e4;
        flag(k, ViolationKind::kPower, "power " + fmt(p) + " at or below p_min " + fmt(sc.p_min));
      }
      if (d >= sc.d_max) {
        r -= 1e4;
        flag(k, ViolationKind::kData, "data " + fmt(d) + " at or above d_max " + fmt(sc.d_max));
      }
    }
    rep.recomputed_reward += r;

    epoch = o.t_s;
    if (points) {
      last_start = o.t_s;
      last_pointing = &o;
    }
    rep.resource_trace.push_back({o.t_s, p, d});
  }

  rep.feasible = rep.violations.empty();
  return rep;
}

void print_report(std::ostream& os, const ValidationReport& rep) {
  os << std::setprecision(12);
  os << "feasible: " << (rep.feasible ? "yes" : "no") << '\n';
  os << "recomputed_reward: " << rep.recomputed_reward << '\n';
  os << "reported_reward: " << rep.reported_reward << '\n';
  os << "images_collected: " << rep.images_collected << '\n';
  os << "violations: " << rep.violations.size() << '\n';
  for (const auto& v : rep.violations) {
    os << "  step " << v.step << " [" << to_string(v.kind) << "] " << v.detail << '\n';
  }
}

void write_trace_csv(std::ostream& os, const ValidationReport& rep) {
  os << "t_s,p,d\n" << std::setprecision(17);
  for (const auto& pt : rep.resource_trace) os << pt.t << ',' << pt.p << ',' << pt.d << '\n';
}

}  // namespace orbitsched

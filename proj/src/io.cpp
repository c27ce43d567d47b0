#include "orbitsched/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace orbitsched {

using nlohmann::json;
using nlohmann::ordered_json;

FormatError::FormatError(const std::string& message, std::string field, int line)
    : std::runtime_error(message), field_(std::move(field)), line_(line) {}

namespace {

// Walks a document while tracking the JSON pointer of the current value for diagnostics.
class Reader {
 public:
  Reader(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return value_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(path_ + ": " + what, path_);
  }

  bool has(const std::string& key) const { return value_.is_object() && value_.contains(key); }

  Reader at(const std::string& key) const {
    if (!value_.is_object()) fail("expected an object");
    auto it = value_.find(key);
    if (it == value_.end()) throw FormatError(path_ + "/" + key + ": missing required field", path_ + "/" + key);
    return Reader(*it, path_ + "/" + key);
  }

  Reader at(std::size_t index) const { return Reader(value_.at(index), path_ + "/" + std::to_string(index)); }

  std::size_t array_size() const {
    if (!value_.is_array()) fail("expected an array");
    return value_.size();
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }
  double number(const std::string& key) const { return at(key).number(); }
  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) const {
    Reader r = at(key);
    if (!r.value_.is_number_integer()) r.fail("expected an integer");
    return r.value_.get<long long>();
  }

  std::string string(const std::string& key) const {
    Reader r = at(key);
    if (!r.value_.is_string()) r.fail("expected a string");
    return r.value_.get<std::string>();
  }

  Vec3 vec3(const std::string& key) const {
    Reader r = at(key);
    if (!r.value_.is_array() || r.value_.size() != 3) r.fail("expected an array of 3 numbers");
    return {r.at(std::size_t{0}).number(), r.at(std::size_t{1}).number(), r.at(std::size_t{2}).number()};
  }

 private:
  const json& value_;
  std::string path_;
};

void check_schema(const Reader& root) {
  const long long version = root.integer("schema_version");
  if (version != kSchemaVersion) {
    throw FormatError("/schema_version: unsupported schema version " + std::to_string(version) + " (expected " +
                          std::to_string(kSchemaVersion) + ")",
                      "/schema_version");
  }
}

// Runs a validation step, attaching the JSON pointer of the value being validated.
template <typename F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw FormatError(path + ": " + e.what(), path);
  }
}

ordered_json rates_json(const ModeRates& r) {
  return {{"collect", r.collect}, {"contact", r.contact}, {"sunpoint", r.sunpoint}};
}

ModeRates rates_from(const Reader& r) { return {r.number("collect"), r.number("contact"), r.number("sunpoint")}; }

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

std::string location_id(const Scenario& sc, Mode mode, int location) {
  if (mode == Mode::kCollect && location >= 0 && static_cast<std::size_t>(location) < sc.requests.size()) {
    return sc.requests[static_cast<std::size_t>(location)].id;
  }
  if (mode == Mode::kContact && location >= 0 && static_cast<std::size_t>(location) < sc.stations.size()) {
    return sc.stations[static_cast<std::size_t>(location)].id;
  }
  return {};
}

// Sentinel for a location id that does not resolve; never a valid index.
constexpr int kUnresolvedLocation = -2;

std::vector<GroundStation> stations_from_reader(const Reader& sts) {
  std::vector<GroundStation> out;
  for (std::size_t i = 0; i < sts.array_size(); ++i) {
    const Reader g = sts.at(i);
    GroundStation st;
    st.id = g.string("id");
    st.point = {g.number("lat_deg"), g.number("lon_deg"), g.number_or("alt_m", 0.0)};
    st.min_elevation_deg = g.number_or("min_elevation_deg", kDefaultMinElevationDeg);
    checked(g.path(), [&] { st.check(); });
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace

std::vector<GroundStation> stations_from_json(const json& doc) {
  const Reader root(doc, "");
  if (doc.is_object() && doc.contains("stations")) return stations_from_reader(root.at("stations"));
  return stations_from_reader(root);
}

ordered_json scenario_to_json(const Scenario& sc) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["horizon_s"] = sc.horizon_s;
  doc["orbit"] = {{"altitude_km", sc.orbit.altitude_km},
                  {"inclination_deg", sc.orbit.inclination_deg},
                  {"raan_deg", sc.orbit.raan_deg},
                  {"arg_lat_epoch_deg", sc.orbit.arg_lat_epoch_deg},
                  {"epoch", sc.orbit.epoch}};
  const auto& s = sc.spacecraft;
  doc["spacecraft"] = {{"slew_rate_deg_s", s.slew_rate_deg_s},
                       {"power_rates", rates_json(s.power_rates)},
                       {"data_rates", rates_json(s.data_rates)},
                       {"p_min", s.p_min},
                       {"d_max", s.d_max},
                       {"p0", s.p0},
                       {"d0", s.d0}};
  auto& reqs = doc["requests"] = ordered_json::array();
  for (const auto& r : sc.requests) {
    reqs.push_back({{"id", r.id},
                    {"lat_deg", r.point.lat_deg},
                    {"lon_deg", r.point.lon_deg},
                    {"alt_m", r.point.alt_m},
                    {"reward", r.reward},
                    {"duration_s", r.duration_s},
                    {"max_off_nadir_deg", r.max_off_nadir_deg}});
  }
  auto& sts = doc["stations"] = ordered_json::array();
  for (const auto& g : sc.stations) {
    sts.push_back({{"id", g.id},
                   {"lat_deg", g.point.lat_deg},
                   {"lon_deg", g.point.lon_deg},
                   {"alt_m", g.point.alt_m},
                   {"min_elevation_deg", g.min_elevation_deg}});
  }
  if (sc.has_opportunities()) {
    auto& ops = doc["opportunities"] = ordered_json::array();
    for (const auto& o : sc.opportunities()) {
      const std::string loc = location_id(sc, o.mode, o.location);
      ops.push_back({{"id", o.id},
                     {"mode", std::string(to_string(o.mode))},
                     {"location_id", loc.empty() ? ordered_json(nullptr) : ordered_json(loc)},
                     {"t_s", o.t_s},
                     {"t_e", o.t_e},
                     {"reward", o.reward},
                     {"pointing_start", vec_json(o.pointing_start.direction)},
                     {"pointing_end", vec_json(o.pointing_end.direction)}});
    }
  }
  return doc;
}

Scenario scenario_from_json(const json& doc) {
  const Reader root(doc, "");
  if (!doc.is_object()) root.fail("expected a JSON object at top level");
  check_schema(root);

  Scenario sc;
  sc.horizon_s = root.number("horizon_s");

  const Reader orbit = root.at("orbit");
  sc.orbit.altitude_km = orbit.number("altitude_km");
  sc.orbit.inclination_deg = orbit.number("inclination_deg");
  sc.orbit.raan_deg = orbit.number_or("raan_deg", 0.0);
  sc.orbit.arg_lat_epoch_deg = orbit.number_or("arg_lat_epoch_deg", 0.0);
  sc.orbit.epoch = orbit.number_or("epoch", 0.0);
  checked("/orbit", [&] { sc.orbit.check(); });

  if (root.has("spacecraft")) {
    const Reader s = root.at("spacecraft");
    auto& cfg = sc.spacecraft;
    cfg.slew_rate_deg_s = s.number_or("slew_rate_deg_s", cfg.slew_rate_deg_s);
    if (s.has("power_rates")) cfg.power_rates = rates_from(s.at("power_rates"));
    if (s.has("data_rates")) cfg.data_rates = rates_from(s.at("data_rates"));
    cfg.p_min = s.number_or("p_min", cfg.p_min);
    cfg.d_max = s.number_or("d_max", cfg.d_max);
    cfg.p0 = s.number_or("p0", cfg.p0);
    cfg.d0 = s.number_or("d0", cfg.d0);
    checked("/spacecraft", [&] { cfg.check(); });
  }

  const Reader reqs = root.at("requests");
  for (std::size_t i = 0; i < reqs.array_size(); ++i) {
    const Reader r = reqs.at(i);
    ImageRequest req;
    req.id = r.string("id");
    req.point = {r.number("lat_deg"), r.number("lon_deg"), r.number_or("alt_m", 0.0)};
    req.reward = r.number_or("reward", 1.0);
    req.duration_s = r.number_or("duration_s", kDefaultCollectDurationS);
    req.max_off_nadir_deg = r.number_or("max_off_nadir_deg", kDefaultMaxOffNadirDeg);
    checked(r.path(), [&] { req.check(); });
    sc.requests.push_back(std::move(req));
  }
  if (root.has("stations")) sc.stations = stations_from_reader(root.at("stations"));
  checked("", [&] { sc.check(); });

  if (root.has("opportunities")) {
    std::unordered_map<std::string, int> request_index;
    std::unordered_map<std::string, int> station_index;
    for (std::size_t i = 0; i < sc.requests.size(); ++i) request_index[sc.requests[i].id] = static_cast<int>(i);
    for (std::size_t i = 0; i < sc.stations.size(); ++i) station_index[sc.stations[i].id] = static_cast<int>(i);

    const Reader ops = root.at("opportunities");
    std::vector<Opportunity> out;
    for (std::size_t i = 0; i < ops.array_size(); ++i) {
      const Reader r = ops.at(i);
      Opportunity o;
      o.id = static_cast<int>(r.integer("id"));
      const std::string mode = r.string("mode");
      checked(r.path() + "/mode", [&] { o.mode = mode_from_string(mode); });
      const Reader loc = r.at("location_id");
      if (o.mode == Mode::kSunpoint) {
        if (!loc.raw().is_null()) loc.fail("sunpoint opportunity " + std::to_string(o.id) + " must have a null location_id");
      } else {
        if (!loc.raw().is_string()) loc.fail("expected a string");
        const auto& table = o.mode == Mode::kCollect ? request_index : station_index;
        auto it = table.find(loc.raw().get<std::string>());
        if (it == table.end()) {
          loc.fail("opportunity " + std::to_string(o.id) + " names unknown location '" +
                   loc.raw().get<std::string>() + "'");
        }
        o.location = it->second;
      }
      o.t_s = r.number("t_s");
      o.t_e = r.number("t_e");
      o.reward = r.number_or("reward", 0.0);
      o.pointing_start = {r.vec3("pointing_start"), o.t_s};
      o.pointing_end = {r.vec3("pointing_end"), o.t_e};
      out.push_back(o);
    }
    checked("/opportunities", [&] { sc.set_opportunities(std::move(out)); });
  }
  return sc;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw FormatError(origin + ":" + std::to_string(line) + ": syntax error: " + e.what(), {}, line);
  }
}

namespace {

void write_json(const ordered_json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  const json doc = parse_json_text(read_text_file(path), path.string());
  try {
    return scenario_from_json(doc);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.field(), e.line());
  }
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_json(scenario_to_json(scenario), path);
}

ordered_json plan_to_json(const Plan& plan, const Scenario& sc) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["solver"] = plan.solver_name;
  doc["config"] = plan.config_snapshot;
  auto& steps = doc["steps"] = ordered_json::array();
  for (const auto& s : plan.steps) {
    const std::string loc = location_id(sc, s.action.mode, s.action.location);
    steps.push_back({{"action_id", s.action.opportunity_id},
                     {"mode", std::string(to_string(s.action.mode))},
                     {"t_s", s.action.t_s},
                     {"t_e", s.action.t_e},
                     {"location_id", loc.empty() ? ordered_json(nullptr) : ordered_json(loc)},
                     {"reward", s.reward}});
  }
  ordered_json totals;
  totals["total_reward"] = plan.total_reward;
  totals["collect_reward"] = plan.collect_reward;
  totals["images_collected"] = plan.images_collected;
  totals["discounted_return"] = plan.discounted_return;
  totals["steps"] = plan.steps.size();
  if (plan.optimal) totals["optimal"] = *plan.optimal;
  if (plan.path_weight) totals["path_weight"] = *plan.path_weight;
  doc["totals"] = totals;
  return doc;
}

Plan plan_from_json(const json& doc, const Scenario& sc) {
  const Reader root(doc, "");
  if (!doc.is_object()) root.fail("expected a JSON object at top level");
  check_schema(root);
  Plan plan;
  plan.solver_name = root.has("solver") ? root.string("solver") : "";
  if (root.has("config")) plan.config_snapshot = root.at("config").raw();

  const Reader steps = root.at("steps");
  for (std::size_t i = 0; i < steps.array_size(); ++i) {
    const Reader r = steps.at(i);
    PlanStep step;
    step.action.opportunity_id = static_cast<int>(r.integer("action_id"));
    const std::string mode = r.string("mode");
    checked(r.path() + "/mode", [&] { step.action.mode = mode_from_string(mode); });
    step.action.t_s = r.number("t_s");
    step.action.t_e = r.number("t_e");
    const Reader loc = r.at("location_id");
    step.action.location = -1;
    if (!loc.raw().is_null()) {
      if (!loc.raw().is_string()) loc.fail("expected a string or null");
      const std::string name = loc.raw().get<std::string>();
      step.action.location = kUnresolvedLocation;
      const auto match = [&](const auto& table) {
        for (std::size_t k = 0; k < table.size(); ++k) {
          if (table[k].id == name) step.action.location = static_cast<int>(k);
        }
      };
      if (step.action.mode == Mode::kCollect) match(sc.requests);
      if (step.action.mode == Mode::kContact) match(sc.stations);
    }
    if (auto idx = sc.has_opportunities() ? sc.find_opportunity(step.action.opportunity_id) : std::nullopt) {
      step.action.opportunity = *idx;
    }
    step.reward = r.number("reward");
    plan.total_reward += step.reward;
    plan.steps.push_back(std::move(step));
  }
  if (root.has("totals")) {
    const Reader t = root.at("totals");
    plan.total_reward = t.number_or("total_reward", plan.total_reward);
    plan.collect_reward = t.number_or("collect_reward", 0.0);
    plan.images_collected = static_cast<std::size_t>(t.number_or("images_collected", 0.0));
    plan.discounted_return = t.number_or("discounted_return", 0.0);
    if (t.has("optimal")) plan.optimal = t.at("optimal").raw().get<bool>();
    if (t.has("path_weight")) plan.path_weight = t.number("path_weight");
  }
  return plan;
}

Plan load_plan(const std::filesystem::path& path, const Scenario& scenario) {
  const json doc = parse_json_text(read_text_file(path), path.string());
  try {
    return plan_from_json(doc, scenario);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.field(), e.line());
  }
}

void save_plan(const Plan& plan, const Scenario& scenario, const std::filesystem::path& path) {
  write_json(plan_to_json(plan, scenario), path);
}

}  // namespace orbitsched

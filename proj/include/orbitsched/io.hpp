// Scenario and plan files: JSON documents carrying a `schema_version` field.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "orbitsched/scenario.hpp"
#include "orbitsched/solvers.hpp"

namespace orbitsched {

inline constexpr int kSchemaVersion = 1;

/// Malformed or invalid file content. `field` is a JSON pointer ("/requests/3/lat_deg") when the
/// problem is a specific value, `line` the 1-based line for syntax errors (0 when unknown).
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& message, std::string field = {}, int line = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

nlohmann::ordered_json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

/// Station list: either a bare array or an object with a "stations" array.
std::vector<GroundStation> stations_from_json(const nlohmann::json& doc);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Records per step: action_id, mode, t_s, t_e, location_id, reward; followed by totals.
/// Wall time is left out so that reruns produce byte-identical files.
nlohmann::ordered_json plan_to_json(const Plan& plan, const Scenario& scenario);
/// Steps carry actions and reported rewards only; states are not stored in the file.
Plan plan_from_json(const nlohmann::json& doc, const Scenario& scenario);

Plan load_plan(const std::filesystem::path& path, const Scenario& scenario);
void save_plan(const Plan& plan, const Scenario& scenario, const std::filesystem::path& path);

/// Parses text into JSON, converting syntax errors to FormatError with a line number.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace orbitsched

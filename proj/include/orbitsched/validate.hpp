// Independent schedule replayer. Deliberately shares no transition or reward code with the SMDP
// module: a modelling bug has to be written twice to slip through.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "orbitsched/scenario.hpp"
#include "orbitsched/smdp.hpp"
#include "orbitsched/solvers.hpp"

namespace orbitsched {

enum class ViolationKind { kOverlap, kSlew, kPower, kData, kDuplicateCollect, kUnknownOpportunity };

std::string_view to_string(ViolationKind kind);

struct Violation {
  std::size_t step = 0;
  ViolationKind kind = ViolationKind::kOverlap;
  std::string detail;
};

struct TracePoint {
  double t = 0.0;
  double p = 0.0;
  double d = 0.0;
};

struct ValidationReport {
  bool feasible = true;
  std::vector<Violation> violations;
  double recomputed_reward = 0.0;
  double reported_reward = 0.0;
  std::vector<TracePoint> resource_trace;
  std::size_t images_collected = 0;

  std::size_t count(ViolationKind kind) const;
};

ValidationReport validate(const Plan& plan, const Scenario& scenario, const SmdpConfig& config);

/// Human-readable report, one violation per line.
void print_report(std::ostream& os, const ValidationReport& report);
/// CSV with header `t_s,p,d`.
void write_trace_csv(std::ostream& os, const ValidationReport& report);

}  // namespace orbitsched

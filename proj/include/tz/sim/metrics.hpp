#pragma once

// Run metrics. Everything here is computed from the trace alone, so a trace
// file can be re-scored offline and must reproduce the run-time numbers.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "tz/trace.hpp"

namespace tz::sim {

struct RunMetrics {
  // 1.0 with the vacuous flag set when there were no emergency calls.
  double emergency_call_availability = 1.0;
  bool emergency_call_availability_vacuous = true;
  std::uint64_t emergency_call_requests = 0;
  std::uint64_t emergency_call_grants = 0;

  // Audited share of the security operations executed in D and L.
  double audit_completeness = 1.0;
  bool audit_completeness_vacuous = true;
  std::uint64_t local_security_ops = 0;
  std::uint64_t audited_local_security_ops = 0;

  std::uint64_t unauthorized_grants = 0;
  std::uint64_t forced_reauths = 0;
  std::uint64_t local_auth_successes = 0;

  // Mean dwell per visit, in C, W, L, R, D order. Empty for unvisited states.
  std::array<std::optional<double>, 5> mean_time_in_state{};

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

RunMetrics compute_metrics(std::span<const TraceEvent> trace);

Json metrics_to_json(const RunMetrics& m);

// Metrics file content: pretty-printed JSON plus a trailing newline.
std::string metrics_document(const RunMetrics& m);

std::string metrics_summary(const RunMetrics& m);

}  // namespace tz::sim

#pragma once

// One deterministic run of a scenario: kernel, bus, trust zone, central
// cloud and UEs wired together, driven by the scripted events.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "tz/interconnect.hpp"
#include "tz/sim/central_cloud.hpp"
#include "tz/sim/invariants.hpp"
#include "tz/sim/kernel.hpp"
#include "tz/sim/metrics.hpp"
#include "tz/sim/scenario.hpp"
#include "tz/sim/ue_population.hpp"
#include "tz/trace.hpp"
#include "tz/trust_zone.hpp"

namespace tz::sim {

inline constexpr SimTime kDefaultUntil = 600'000;

struct RunOptions {
  std::optional<std::uint64_t> seed;  // falls back to the scenario's config.seed
  SimTime until = kDefaultUntil;
  bool check_invariants = false;
};

struct RunResult {
  std::vector<TraceEvent> trace;
  RunMetrics metrics;
};

class Simulation {
 public:
  Simulation(const Scenario& scenario, RunOptions options);

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Runs to `until`. With invariant checking enabled throws
  /// InvariantViolation on the first broken invariant; the partial trace
  /// stays available through trace().
  RunResult run();

  std::uint64_t seed() const noexcept { return seed_; }
  const TraceLog& trace() const noexcept { return trace_; }
  Kernel& kernel() noexcept { return kernel_; }
  Interconnect& bus() noexcept { return bus_; }
  TrustZone& zone() noexcept { return *zone_; }
  CentralCloud& cloud() noexcept { return *cloud_; }
  UePopulation& ues() noexcept { return *ues_; }

 private:
  void schedule_inputs();
  Json end_snapshot() const;

  const Scenario& scenario_;
  RunOptions options_;
  std::uint64_t seed_;
  Kernel kernel_;
  TraceLog trace_;
  Interconnect bus_;
  std::unique_ptr<TrustZone> zone_;
  std::unique_ptr<CentralCloud> cloud_;
  std::unique_ptr<UePopulation> ues_;
  std::unique_ptr<InvariantChecker> checker_;
  bool ran_ = false;
};

RunResult run(const Scenario& scenario, RunOptions options);

// Trace file content: one line per event.
std::string trace_document(const std::vector<TraceEvent>& trace);

}  // namespace tz::sim

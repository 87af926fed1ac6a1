#pragma once

// Central cloud connection monitoring: probe merging, link classification,
// malfunction diagnosis and priority hints for the degraded link.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tz/emergency.hpp"
#include "tz/state_machine.hpp"
#include "tz/types.hpp"

namespace tz {

/// What a probe target (OSS or NFV-MANO) answers about the link.
struct ProbeReading {
  bool reachable = true;
  double latency_ms = 10.0;
  double loss_rate = 0.0;
  double throughput = 1.0;

  friend bool operator==(const ProbeReading&, const ProbeReading&) = default;
};

struct Ec4Sample {
  SimTime at = 0;
  bool reachable = false;
  std::optional<double> latency_ms;  // present iff reachable
  double loss_rate = 0.0;
  double throughput = 0.0;

  static Ec4Sample unreachable(SimTime at) { return {at, false, std::nullopt, 0.0, 0.0}; }
  static Ec4Sample from_reading(const ProbeReading& r, SimTime at);

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;

  friend bool operator==(const Ec4Sample&, const Ec4Sample&) = default;
};

struct Ec4Thresholds {
  std::size_t window_size = 3;
  double weak_loss = 0.10;
  double weak_latency_ms = 500.0;
  double weak_throughput = 0.25;
};

/// Pessimistic merge of the two probe answers. An unanswered probe
/// (nullopt) or an unreachable reading makes the whole sample unreachable;
/// otherwise the worst of each metric wins.
Ec4Sample poll_sources(const std::optional<ProbeReading>& oss,
                       const std::optional<ProbeReading>& mano, SimTime now);

/// Lost iff every sample is unreachable. Otherwise Weak when any of the
/// means over reachable samples crosses its threshold, else Healthy.
/// Throws Error{EmptyWindow}.
Ec4Class classify_ec4(std::span<const Ec4Sample> window, const Ec4Thresholds& thresholds);

// Single-reading classification, used for the ground-truth link state.
Ec4Class classify_reading(const ProbeReading& reading, const Ec4Thresholds& thresholds);

enum class Hypothesis : std::uint8_t { Congestion, Disaster, Attack, Unknown };

std::string_view to_string(Hypothesis h) noexcept;

struct Diagnosis {
  SimTime at = 0;
  Hypothesis hypothesis = Hypothesis::Unknown;
  std::vector<std::string> evidence;

  friend bool operator==(const Diagnosis&, const Diagnosis&) = default;
};

/// Rule order Disaster > Congestion > Attack > Unknown. `abrupt_onset` is
/// true when the first degraded window directly followed a healthy one.
/// Throws Error{WrongState} outside W and L.
Diagnosis diagnose(std::span<const Ec4Sample> window,
                   std::span<const DisasterEvent> active_disasters, bool abrupt_onset,
                   TzState state, SimTime now);

enum class FunctionClass : std::uint8_t { Authentication, Authorization, SubscriberSync, Other };
enum class Priority : std::uint8_t { High, Normal };

std::string_view to_string(FunctionClass f) noexcept;
std::string_view to_string(Priority p) noexcept;

struct PriorityHint {
  FunctionClass function_class;
  Priority priority;

  friend bool operator==(const PriorityHint&, const PriorityHint&) = default;
};

std::vector<PriorityHint> priority_hints(TzState state);

Priority priority_of(std::span<const PriorityHint> hints, FunctionClass fc) noexcept;

/// Sliding sample window plus the degradation history the diagnosis needs.
class ConnectionMonitor {
 public:
  explicit ConnectionMonitor(Ec4Thresholds thresholds = {});

  /// Adds a sample. Returns the window class once the window is full.
  std::optional<Ec4Class> ingest(const Ec4Sample& sample);

  std::span<const Ec4Sample> window() const noexcept { return window_; }
  const Ec4Thresholds& thresholds() const noexcept { return thresholds_; }
  std::optional<Ec4Class> last_class() const noexcept { return last_class_; }
  bool abrupt_onset() const noexcept { return abrupt_onset_; }

  Diagnosis diagnose(std::span<const DisasterEvent> active_disasters, TzState state,
                     SimTime now) const;

 private:
  Ec4Thresholds thresholds_;
  std::vector<Ec4Sample> window_;
  std::optional<Ec4Class> last_class_;
  std::uint64_t tick_ = 0;
  std::optional<std::uint64_t> last_healthy_tick_;
  bool degraded_ = false;
  bool abrupt_onset_ = false;
};

}  // namespace tz

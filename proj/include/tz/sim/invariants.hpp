#pragma once

// Step-wise safety checks for debug runs. The checker looks at the new trace
// events and at the live zone state after every kernel step and throws on
// the first violation.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tz/interconnect.hpp"
#include "tz/trace.hpp"
#include "tz/trust_zone.hpp"

namespace tz::sim {

class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string invariant, std::uint64_t seq, const std::string& detail);

  const std::string& invariant() const noexcept { return invariant_; }
  std::uint64_t seq() const noexcept { return seq_; }

 private:
  std::string invariant_;
  std::uint64_t seq_;
};

class InvariantChecker {
 public:
  InvariantChecker(const TrustZone& zone, const Interconnect& bus, SimTime transient_dwell);

  void check(const std::vector<TraceEvent>& trace, SimTime now);

  std::uint64_t checks() const noexcept { return checks_; }

 private:
  void scan(const TraceEvent& ev);
  void check_devices(std::uint64_t seq, SimTime now);
  [[noreturn]] void fail(const std::string& name, std::uint64_t seq, const std::string& detail);

  const TrustZone& zone_;
  const Interconnect& bus_;
  SimTime dwell_;
  std::set<std::string> emergency_names_;
  std::size_t next_ = 0;
  TzState state_ = TzState::C;
  std::optional<SimTime> transient_due_;
  std::uint64_t checks_ = 0;
};

}  // namespace tz::sim

#pragma once

// Emergency services catalog, disaster feed and per-service policy.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tz/state_machine.hpp"
#include "tz/types.hpp"

namespace tz {

enum class ServiceClass : std::uint8_t { DisasterSpecific, AlwaysWithPolicy, AlwaysNoAuth };

struct EmergencyService {
  std::string name;
  ServiceClass service_class;

  friend bool operator==(const EmergencyService&, const EmergencyService&) = default;
};

namespace service {
inline constexpr std::string_view kDisasterAlarm = "DisasterAlarm";
inline constexpr std::string_view kEvacuationGuidance = "EvacuationGuidance";
inline constexpr std::string_view kPositioning = "Positioning";
inline constexpr std::string_view kEmergencyCall = "EmergencyCall";
inline constexpr std::string_view kSms = "SMS";
}  // namespace service

/// DisasterAlarm, EvacuationGuidance, Positioning, EmergencyCall, SMS.
std::vector<EmergencyService> default_catalog();

enum class DisasterKind : std::uint8_t { Earthquake, Fire, Explosion, Other };

std::string_view to_string(DisasterKind k) noexcept;
std::optional<DisasterKind> parse_disaster_kind(std::string_view text) noexcept;

struct DisasterEvent {
  std::string event_id;
  DisasterKind kind = DisasterKind::Other;
  SimTime at = 0;
  SimTime ttl = 3'600'000;

  bool active_at(SimTime now) const noexcept { return now >= at && now < at + ttl; }

  friend bool operator==(const DisasterEvent&, const DisasterEvent&) = default;
};

enum class PolicyVerdict : std::uint8_t { Allow, AllowRestricted, Inactive };

std::string_view to_string(PolicyVerdict v) noexcept;
std::string_view to_string(ServiceClass c) noexcept;

struct PolicyDecision {
  std::string service;
  PolicyVerdict verdict;
  bool requires_auth;

  friend bool operator==(const PolicyDecision&, const PolicyDecision&) = default;
};

PolicyDecision decide_policy(const EmergencyService& service, TzState tz_state, Trust trust,
                             std::span<const DisasterEvent> active_disasters);

std::vector<PolicyDecision> available_services(std::span<const EmergencyService> catalog,
                                               TzState tz_state, Trust trust,
                                               std::span<const DisasterEvent> active_disasters);

// Services a device may use without having authenticated.
std::set<std::string> open_services(std::span<const PolicyDecision> decisions);

struct RestrictedPolicy {
  std::int64_t capacity = 5;
  SimTime period = 60'000;
};

/// Integer token bucket: `capacity` tokens refilled linearly over `period`.
class TokenBucket {
 public:
  TokenBucket(RestrictedPolicy policy, SimTime now);

  bool try_consume(SimTime now);
  std::int64_t tokens(SimTime now);

 private:
  void refill(SimTime now);

  RestrictedPolicy policy_;
  // Fill level in units of token*period/capacity, so refill is exact.
  std::int64_t level_;
  SimTime last_;
};

class EmergencyServices {
 public:
  explicit EmergencyServices(std::vector<EmergencyService> catalog = default_catalog(),
                             RestrictedPolicy restricted = {});

  /// Stores a newly seen event. Returns true if it must be forwarded to the
  /// connection monitor; duplicates of a known event_id return false.
  bool on_disaster(const DisasterEvent& event);

  /// Drops events whose lifetime ended at or before `now`.
  std::vector<std::string> expire(SimTime now);

  std::vector<DisasterEvent> active_disasters(SimTime now) const;

  void on_state(TzState s) noexcept { tz_state_ = s; }
  TzState tz_state() const noexcept { return tz_state_; }

  const std::vector<EmergencyService>& catalog() const noexcept { return catalog_; }
  const EmergencyService* find(std::string_view name) const noexcept;
  bool is_emergency_service(std::string_view name) const noexcept { return find(name) != nullptr; }

  std::vector<PolicyDecision> available_services(TzState s, Trust trust, SimTime now) const;
  std::optional<PolicyDecision> decide(std::string_view name, TzState s, Trust trust,
                                       SimTime now) const;

  // Rate limit applied to AllowRestricted use by a device.
  bool admit_restricted(const UeId& ue, std::string_view service, SimTime now);

 private:
  std::vector<EmergencyService> catalog_;
  RestrictedPolicy restricted_;
  TzState tz_state_ = TzState::C;
  std::set<std::string> seen_;
  std::map<std::string, DisasterEvent> active_;
  std::map<std::pair<UeId, std::string>, TokenBucket> buckets_;
};

}  // namespace tz

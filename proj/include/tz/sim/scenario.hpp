#pragma once

// Scenario documents: run configuration, the initial subscriber databases
// and the scripted event list. Documents are YAML; every problem is
// reported with the line it was found on.

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tz/cccm.hpp"
#include "tz/emergency.hpp"
#include "tz/interconnect.hpp"
#include "tz/types.hpp"

namespace tz::sim {

struct SimConfig {
  std::uint64_t seed = 0;
  SimTime poll_period = 1000;
  SimTime probe_timeout = 500;
  Ec4Thresholds thresholds;
  SimTime transient_dwell = 100;
  SimTime reauth_stagger = 200;
  SimTime central_auth_timeout = 1000;
  SimTime sync_period = 5000;
  SimTime audit_retry = 50;
  SimTime disaster_ttl = 3'600'000;
  RestrictedPolicy restricted;
  SimTime central_latency = 10;
  SimTime intra_edge_latency = 0;
  SimTime weak_latency_factor = 10;
  double weak_drop = 0.2;
  double weak_drop_high = 0.05;
  std::set<std::uint64_t> drop_audit_acks;  // 1-based ack ordinals
  std::string inject_violation;             // "" or "untrusted_grant"
};

struct SubscriberEntry {
  std::string id;
  std::string credential;
  std::int64_t sync_version = 1;
  std::int64_t security_log_version = 0;
};

struct LinkQuality {
  ProbeReading reading;
};
struct DisasterInput {
  DisasterEvent event;
};
struct UeAttach {
  UeId ue_id;
  std::string credential;
};
struct UeDetach {
  UeId ue_id;
};
struct UeAccessRequest {
  UeId ue_id;
  std::string service;
};
struct CentralProfileUpdate {
  SubscriberEntry profile;
  bool in_lss = true;
};

using EventKind = std::variant<LinkQuality, DisasterInput, UeAttach, UeDetach, UeAccessRequest,
                               CentralProfileUpdate>;

struct ScenarioEvent {
  SimTime at = 0;
  EventKind kind;
  int line = 0;
};

struct Scenario {
  int version = 1;
  SimConfig config;
  std::vector<SubscriberEntry> subscribers;
  std::vector<std::string> lss;
  std::vector<ScenarioEvent> events;  // sorted by `at`, stable
};

struct Diagnostic {
  int line = 0;  // 1-based, 0 when unknown
  std::string message;
};

/// Raised for malformed documents. SchemaError covers structure and value
/// problems; ReferenceError covers events naming a device that is not
/// attached at that point of the script.
class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { Schema, Reference };

  ScenarioError(Kind kind, std::vector<Diagnostic> diagnostics);

  Kind kind() const noexcept { return kind_; }
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  Kind kind_;
  std::vector<Diagnostic> diagnostics_;
};

Scenario load_scenario(const std::string& document);

// Throws std::runtime_error when the file cannot be read.
Scenario load_scenario_file(const std::filesystem::path& path);

BusConfig bus_config(const SimConfig& c);

}  // namespace tz::sim

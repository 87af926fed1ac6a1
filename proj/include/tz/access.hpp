#pragma once

// Device table and access decision types owned by the zone manager, plus the
// pure parts of the access-management transfer (trust retention on
// disconnect, quarantine schedule on reconnect).

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tz/state_machine.hpp"
#include "tz/types.hpp"

namespace tz {

enum class AuthOrigin : std::uint8_t { None, Central, Local };
enum class Verdict : std::uint8_t { GrantFull, GrantEmergencyOnly, Deny };
enum class Route : std::uint8_t { CentralVaaa, LocalLaa, None };

std::string_view to_string(AuthOrigin o) noexcept;
std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(Route r) noexcept;

struct DeviceRecord {
  UeId ue_id;
  bool attached = false;
  Trust trust = Trust::Untrusted;
  AuthOrigin auth_origin = AuthOrigin::None;
  std::set<std::string> granted;
  std::optional<SimTime> last_auth_at;

  friend bool operator==(const DeviceRecord&, const DeviceRecord&) = default;
};

using DeviceTable = std::map<UeId, DeviceRecord>;

struct AccessDecision {
  UeId ue_id;
  std::string service;
  Verdict verdict = Verdict::Deny;
  Route route = Route::None;
  std::string reason;
  std::set<std::string> granted;
  TzState state = TzState::C;
  SimTime at = 0;
};

struct ReauthEntry {
  UeId ue_id;
  SimTime disconnect_at = 0;
  AuthOrigin origin = AuthOrigin::None;

  friend bool operator==(const ReauthEntry&, const ReauthEntry&) = default;
};

struct ReauthSchedule {
  std::vector<ReauthEntry> entries;
};

// C, W, R route to the central V-AAA; L and D to the LAA.
constexpr Route route_for(TzState s) noexcept {
  return (s == TzState::L || s == TzState::D) ? Route::LocalLaa : Route::CentralVaaa;
}

/// Disconnect-time trust decision. Devices in `in_flight` (authentication
/// not yet completed) are demoted; every other attached trusted device keeps
/// its trust and grants. Returns the trusted set.
std::set<UeId> retain_trust(DeviceTable& devices, const std::set<UeId>& in_flight);

/// Quarantine order for the attached trusted devices among `trusted`:
/// locally authenticated first, then ascending ue_id, spaced by `stagger`
/// starting one stagger after `now`.
ReauthSchedule build_reauth_schedule(const DeviceTable& devices, const std::set<UeId>& trusted,
                                     SimTime now, SimTime stagger);

// Every attached trusted device.
std::set<UeId> trusted_devices(const DeviceTable& devices);

}  // namespace tz

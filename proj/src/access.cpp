#include "tz/access.hpp"

#include <algorithm>

namespace tz {

std::string_view to_string(AuthOrigin o) noexcept {
  switch (o) {
    case AuthOrigin::None: return "None";
    case AuthOrigin::Central: return "Central";
    case AuthOrigin::Local: return "Local";
  }
  return "?";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::GrantFull: return "GrantFull";
    case Verdict::GrantEmergencyOnly: return "GrantEmergencyOnly";
    case Verdict::Deny: return "Deny";
  }
  return "?";
}

std::string_view to_string(Route r) noexcept {
  switch (r) {
    case Route::CentralVaaa: return "CentralVaaa";
    case Route::LocalLaa: return "LocalLaa";
    case Route::None: return "None";
  }
  return "?";
}

std::set<UeId> retain_trust(DeviceTable& devices, const std::set<UeId>& in_flight) {
  std::set<UeId> trusted;
  for (auto& [id, rec] : devices) {
    if (!rec.attached) continue;
    if (in_flight.contains(id)) {
      rec.trust = Trust::Untrusted;
      rec.auth_origin = AuthOrigin::None;
      rec.granted.clear();
      continue;
    }
    if (rec.trust == Trust::Trusted && rec.auth_origin != AuthOrigin::None) trusted.insert(id);
  }
  return trusted;
}

ReauthSchedule build_reauth_schedule(const DeviceTable& devices, const std::set<UeId>& trusted,
                                     SimTime now, SimTime stagger) {
  std::vector<ReauthEntry> picked;
  for (const auto& id : trusted) {
    auto it = devices.find(id);
    if (it == devices.end()) continue;
    const DeviceRecord& rec = it->second;
    if (!rec.attached || rec.trust != Trust::Trusted) continue;
    picked.push_back({id, 0, rec.auth_origin});
  }
  std::stable_sort(picked.begin(), picked.end(), [](const ReauthEntry& a, const ReauthEntry& b) {
    const bool la = a.origin == AuthOrigin::Local;
    const bool lb = b.origin == AuthOrigin::Local;
    if (la != lb) return la;
    return a.ue_id < b.ue_id;
  });
  for (std::size_t i = 0; i < picked.size(); ++i) {
    picked[i].disconnect_at = now + stagger * static_cast<SimTime>(i + 1);
  }
  return {std::move(picked)};
}

std::set<UeId> trusted_devices(const DeviceTable& devices) {
  std::set<UeId> out;
  for (const auto& [id, rec] : devices) {
    if (rec.attached && rec.trust == Trust::Trusted) out.insert(id);
  }
  return out;
}

}  // namespace tz

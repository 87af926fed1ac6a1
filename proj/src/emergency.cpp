#include "tz/emergency.hpp"

#include <algorithm>

namespace tz {

std::vector<EmergencyService> default_catalog() {
  return {
      {std::string(service::kDisasterAlarm), ServiceClass::DisasterSpecific},
      {std::string(service::kEvacuationGuidance), ServiceClass::DisasterSpecific},
      {std::string(service::kPositioning), ServiceClass::AlwaysWithPolicy},
      {std::string(service::kEmergencyCall), ServiceClass::AlwaysNoAuth},
      {std::string(service::kSms), ServiceClass::AlwaysWithPolicy},
  };
}

std::string_view to_string(DisasterKind k) noexcept {
  switch (k) {
    case DisasterKind::Earthquake: return "Earthquake";
    case DisasterKind::Fire: return "Fire";
    case DisasterKind::Explosion: return "Explosion";
    case DisasterKind::Other: return "Other";
  }
  return "?";
}

std::optional<DisasterKind> parse_disaster_kind(std::string_view text) noexcept {
  for (auto k : {DisasterKind::Earthquake, DisasterKind::Fire, DisasterKind::Explosion,
                 DisasterKind::Other}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(PolicyVerdict v) noexcept {
  switch (v) {
    case PolicyVerdict::Allow: return "Allow";
    case PolicyVerdict::AllowRestricted: return "AllowRestricted";
    case PolicyVerdict::Inactive: return "Inactive";
  }
  return "?";
}

std::string_view to_string(ServiceClass c) noexcept {
  switch (c) {
    case ServiceClass::DisasterSpecific: return "DisasterSpecific";
    case ServiceClass::AlwaysWithPolicy: return "AlwaysWithPolicy";
    case ServiceClass::AlwaysNoAuth: return "AlwaysNoAuth";
  }
  return "?";
}

PolicyDecision decide_policy(const EmergencyService& service, TzState tz_state, Trust trust,
                             std::span<const DisasterEvent> active_disasters) {
  switch (service.service_class) {
    case ServiceClass::AlwaysNoAuth:
      return {service.name, PolicyVerdict::Allow, false};
    case ServiceClass::DisasterSpecific:
      if (active_disasters.empty()) return {service.name, PolicyVerdict::Inactive, false};
      return {service.name, PolicyVerdict::Allow, false};
    case ServiceClass::AlwaysWithPolicy:
      if (tz_state == TzState::L || tz_state == TzState::D) {
        if (trust == Trust::Trusted) return {service.name, PolicyVerdict::Allow, true};
        return {service.name, PolicyVerdict::AllowRestricted, false};
      }
      return {service.name, PolicyVerdict::Allow, true};
  }
  return {service.name, PolicyVerdict::Inactive, false};
}

std::vector<PolicyDecision> available_services(std::span<const EmergencyService> catalog,
                                               TzState tz_state, Trust trust,
                                               std::span<const DisasterEvent> active_disasters) {
  std::vector<PolicyDecision> out;
  out.reserve(catalog.size());
  for (const auto& s : catalog) out.push_back(decide_policy(s, tz_state, trust, active_disasters));
  return out;
}

std::set<std::string> open_services(std::span<const PolicyDecision> decisions) {
  std::set<std::string> out;
  for (const auto& d : decisions) {
    if (d.verdict != PolicyVerdict::Inactive && !d.requires_auth) out.insert(d.service);
  }
  return out;
}

TokenBucket::TokenBucket(RestrictedPolicy policy, SimTime now)
    : policy_(policy), level_(policy.capacity * policy.period), last_(now) {}

void TokenBucket::refill(SimTime now) {
  if (now > last_) {
    const std::int64_t max_level = policy_.capacity * policy_.period;
    level_ = std::min(max_level, level_ + (now - last_) * policy_.capacity);
    last_ = now;
  }
}

bool TokenBucket::try_consume(SimTime now) {
  refill(now);
  if (level_ < policy_.period) return false;
  level_ -= policy_.period;
  return true;
}

std::int64_t TokenBucket::tokens(SimTime now) {
  refill(now);
  return level_ / policy_.period;
}

EmergencyServices::EmergencyServices(std::vector<EmergencyService> catalog,
                                     RestrictedPolicy restricted)
    : catalog_(std::move(catalog)), restricted_(restricted) {}

bool EmergencyServices::on_disaster(const DisasterEvent& event) {
  if (!seen_.insert(event.event_id).second) return false;
  active_.emplace(event.event_id, event);
  return true;
}

std::vector<std::string> EmergencyServices::expire(SimTime now) {
  std::vector<std::string> gone;
  for (auto it = active_.begin(); it != active_.end();) {
    if (now >= it->second.at + it->second.ttl) {
      gone.push_back(it->first);
      it = active_.erase(it);
    } else {
      ++it;
    }
  }
  return gone;
}

std::vector<DisasterEvent> EmergencyServices::active_disasters(SimTime now) const {
  std::vector<DisasterEvent> out;
  for (const auto& [id, ev] : active_) {
    if (ev.active_at(now)) out.push_back(ev);
  }
  return out;
}

const EmergencyService* EmergencyServices::find(std::string_view name) const noexcept {
  auto it = std::find_if(catalog_.begin(), catalog_.end(),
                         [&](const EmergencyService& s) { return s.name == name; });
  return it == catalog_.end() ? nullptr : &*it;
}

std::vector<PolicyDecision> EmergencyServices::available_services(TzState s, Trust trust,
                                                                  SimTime now) const {
  const auto active = active_disasters(now);
  return tz::available_services(catalog_, s, trust, active);
}

std::optional<PolicyDecision> EmergencyServices::decide(std::string_view name, TzState s,
                                                        Trust trust, SimTime now) const {
  const auto* svc = find(name);
  if (!svc) return std::nullopt;
  const auto active = active_disasters(now);
  return decide_policy(*svc, s, trust, active);
}

bool EmergencyServices::admit_restricted(const UeId& ue, std::string_view service, SimTime now) {
  auto key = std::make_pair(ue, std::string(service));
  auto it = buckets_.find(key);
  if (it == buckets_.end()) it = buckets_.emplace(key, TokenBucket(restricted_, now)).first;
  return it->second.try_consume(now);
}

}  // namespace tz

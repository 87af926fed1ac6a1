#include "tz/local_access.hpp"

#include <algorithm>

#include "tz/errors.hpp"

namespace tz {

std::string_view to_string(LaaActivation a) noexcept {
  switch (a) {
    case LaaActivation::Inactive: return "Inactive";
    case LaaActivation::Activated: return "Activated";
    case LaaActivation::Active: return "Active";
    case LaaActivation::Deactivated: return "Deactivated";
  }
  return "?";
}

Bytes derive_token_bytes(std::span<const std::uint8_t> credential_digest, std::uint64_t counter) {
  Bytes input(credential_digest.begin(), credential_digest.end());
  for (int shift = 56; shift >= 0; shift -= 8) {
    input.push_back(static_cast<std::uint8_t>(counter >> shift));
  }
  return sha256(input);
}

LocalAccess::LocalAccess(std::vector<SubscriberProfile> initial, OperationReporter reporter)
    : reporter_(std::move(reporter)) {
  for (auto& p : initial) {
    auto id = p.subscriber_id;
    profiles_.insert_or_assign(std::move(id), std::move(p));
  }
}

LaaActivation LocalAccess::set_activation(TzState tz_state) {
  tz_state_ = tz_state;
  activation_ = activation_for(tz_state);
  if (activation_ == LaaActivation::Deactivated) {
    for (auto& [ue, tok] : issued_) std::fill(tok.token.begin(), tok.token.end(), 0);
    issued_.clear();
  }
  return activation_;
}

void LocalAccess::report(AuditKind kind, const UeId& ue_id, std::string_view outcome) const {
  if (reporter_) reporter_(kind, ue_id, outcome);
}

Trust LocalAccess::local_authenticate(const UeId& ue_id, std::string_view presented_credential) {
  if (!operational()) {
    throw Error(ErrorCode::NotActive, "local_authenticate while LAA is " +
                                          std::string(to_string(activation_)));
  }
  Trust verdict = Trust::Untrusted;
  if (auto it = profiles_.find(ue_id); it != profiles_.end()) {
    if (credential_digest(presented_credential) == it->second.credential_digest) {
      verdict = Trust::Trusted;
    }
  }
  report(AuditKind::LocalAuthenticate, ue_id, verdict == Trust::Trusted ? "trusted" : "untrusted");
  return verdict;
}

AsKeyToken LocalAccess::derive_as_key(const UeId& ue_id, KeyScope requested) {
  if (!operational()) {
    throw Error(ErrorCode::NotActive,
                "derive_as_key while LAA is " + std::string(to_string(activation_)));
  }
  if (requested != KeyScope::AS) {
    report(AuditKind::KeyDerivation, ue_id, "scope_violation");
    throw Error(ErrorCode::ScopeViolation, "NAS keys are derived only in the central cloud");
  }
  auto it = profiles_.find(ue_id);
  if (it == profiles_.end()) {
    report(AuditKind::KeyDerivation, ue_id, "unknown_subscriber");
    throw Error(ErrorCode::UnknownSubscriber, ue_id);
  }
  SubscriberProfile& p = it->second;
  AsKeyToken tok{ue_id, p.key_counter, derive_token_bytes(p.credential_digest, p.key_counter)};
  ++p.key_counter;
  issued_.insert_or_assign(ue_id, tok);
  report(AuditKind::KeyDerivation, ue_id, "counter=" + std::to_string(tok.counter));
  return tok;
}

SyncReport LocalAccess::sync_profiles(std::span<const SubscriberProfile> central_snapshot,
                                      SimTime now) {
  if (tz_state_ == TzState::L || tz_state_ == TzState::D) {
    throw Error(ErrorCode::NoConnectivity,
                "profile sync in state " + std::string(to_string(tz_state_)));
  }
  auto next = profiles_;
  SyncReport rep;
  for (const auto& central : central_snapshot) {
    auto it = next.find(central.subscriber_id);
    if (it != next.end() && central.sync_version <= it->second.sync_version) {
      ++rep.skipped;
      continue;
    }
    SubscriberProfile merged = central;
    if (it != next.end()) merged.key_counter = std::max(it->second.key_counter, central.key_counter);
    next.insert_or_assign(central.subscriber_id, std::move(merged));
    ++rep.applied;
  }
  profiles_.swap(next);
  last_sync_ = now;
  return rep;
}

const SubscriberProfile* LocalAccess::find(const UeId& ue_id) const {
  auto it = profiles_.find(ue_id);
  return it == profiles_.end() ? nullptr : &it->second;
}

}  // namespace tz

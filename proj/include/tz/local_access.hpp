#pragma once

// Local Access Assistant with its Local Subscriber Server table.
//
// The LAA verifies devices against synchronized subscriber profiles and
// derives access-stratum keys while the central AMF is out of reach. It can
// never produce a non-access-stratum key.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tz/audit.hpp"
#include "tz/crypto.hpp"
#include "tz/state_machine.hpp"
#include "tz/types.hpp"

namespace tz {

enum class LaaActivation : std::uint8_t { Inactive, Activated, Active, Deactivated };

std::string_view to_string(LaaActivation a) noexcept;

constexpr LaaActivation activation_for(TzState s) noexcept {
  switch (s) {
    case TzState::R: return LaaActivation::Deactivated;
    case TzState::D: return LaaActivation::Activated;
    case TzState::L: return LaaActivation::Active;
    case TzState::C:
    case TzState::W: return LaaActivation::Inactive;
  }
  return LaaActivation::Inactive;
}

struct SubscriberProfile {
  std::string subscriber_id;
  Bytes credential_digest;
  std::int64_t security_log_version = 0;
  std::int64_t sync_version = 0;
  std::uint64_t key_counter = 0;

  friend bool operator==(const SubscriberProfile&, const SubscriberProfile&) = default;
};

enum class KeyScope : std::uint8_t { AS, NAS };

/// Access-stratum key material. The scope is a type-level constant.
struct AsKeyToken {
  static constexpr KeyScope scope = KeyScope::AS;

  UeId ue_id;
  std::uint64_t counter = 0;
  Bytes token;

  friend bool operator==(const AsKeyToken&, const AsKeyToken&) = default;
};

// token = SHA-256(credential_digest || big-endian 64-bit counter)
Bytes derive_token_bytes(std::span<const std::uint8_t> credential_digest, std::uint64_t counter);

struct SyncReport {
  std::size_t applied = 0;
  std::size_t skipped = 0;
};

// Invoked once per local_authenticate / derive_as_key call.
using OperationReporter =
    std::function<void(AuditKind kind, const UeId& ue_id, std::string_view outcome)>;

class LocalAccess {
 public:
  explicit LocalAccess(std::vector<SubscriberProfile> initial = {}, OperationReporter reporter = {});

  LaaActivation set_activation(TzState tz_state);
  LaaActivation activation() const noexcept { return activation_; }
  bool operational() const noexcept {
    return activation_ == LaaActivation::Activated || activation_ == LaaActivation::Active;
  }

  /// Trusted iff the profile exists and the presented credential digests to
  /// the stored value. Throws Error{NotActive} outside D and L.
  Trust local_authenticate(const UeId& ue_id, std::string_view presented_credential);

  /// Throws Error{NotActive}, Error{UnknownSubscriber} or
  /// Error{ScopeViolation} (any request for a NAS key).
  AsKeyToken derive_as_key(const UeId& ue_id, KeyScope requested = KeyScope::AS);

  /// Central profiles with a higher sync_version replace the local copy;
  /// key counters merge by max. Applied atomically. Throws
  /// Error{NoConnectivity} in L and D.
  SyncReport sync_profiles(std::span<const SubscriberProfile> central_snapshot, SimTime now);

  const SubscriberProfile* find(const UeId& ue_id) const;
  std::size_t profile_count() const noexcept { return profiles_.size(); }
  std::size_t cached_token_count() const noexcept { return issued_.size(); }
  std::optional<SimTime> last_sync_at() const noexcept { return last_sync_; }

 private:
  void report(AuditKind kind, const UeId& ue_id, std::string_view outcome) const;

  std::map<std::string, SubscriberProfile> profiles_;
  std::map<UeId, AsKeyToken> issued_;
  OperationReporter reporter_;
  LaaActivation activation_ = LaaActivation::Inactive;
  TzState tz_state_ = TzState::C;
  std::optional<SimTime> last_sync_;
};

}  // namespace tz

#pragma once

// Security auditing for operations executed while the zone runs without the
// central cloud. Records are buffered per activation epoch and shipped to the
// central auditing center, which de-duplicates by (epoch, seq).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tz/state_machine.hpp"
#include "tz/types.hpp"

namespace tz {

enum class AuditActor : std::uint8_t { Zm, Laa };

enum class AuditKind : std::uint8_t {
  AccessDecision,
  LocalAuthenticate,
  KeyDerivation,
  TrustChange,
  ForcedDisconnect,
};

std::string_view to_string(AuditActor a) noexcept;
std::string_view to_string(AuditKind k) noexcept;
std::optional<AuditKind> parse_audit_kind(std::string_view text) noexcept;
std::optional<AuditActor> parse_audit_actor(std::string_view text) noexcept;

struct AuditRecord {
  std::uint64_t epoch = 0;
  std::uint64_t seq = 0;  // starts at 1 in every epoch
  SimTime at = 0;
  AuditActor actor = AuditActor::Zm;
  AuditKind kind = AuditKind::AccessDecision;
  UeId ue_id;
  std::string outcome;

  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

struct AuditBufferState {
  bool active = false;
  std::vector<AuditRecord> buffered;
  std::uint64_t delivered_up_to = 0;
};

struct AuditBatch {
  std::uint64_t epoch = 0;
  std::vector<AuditRecord> records;
};

struct AuditAck {
  std::uint64_t epoch = 0;
  std::uint64_t up_to = 0;
};

/// Receiving side of a push. Returning nullopt models a lost acknowledgment.
class AuditCenterEndpoint {
 public:
  virtual ~AuditCenterEndpoint() = default;
  virtual std::optional<AuditAck> deliver(const AuditBatch& batch) = 0;
};

/// Central auditing center. Stores each (epoch, seq) once, in arrival order.
class AuditCenter final : public AuditCenterEndpoint {
 public:
  std::optional<AuditAck> deliver(const AuditBatch& batch) override;

  const std::vector<AuditRecord>& records() const noexcept { return records_; }
  std::size_t duplicates() const noexcept { return duplicates_; }

  // Highest seq for which every lower seq of the epoch is present.
  std::uint64_t contiguous_up_to(std::uint64_t epoch) const;

 private:
  std::vector<AuditRecord> records_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> index_;
  std::size_t duplicates_ = 0;
};

class SecurityAuditor {
 public:
  /// Follows the zone state. Entering D activates (opening a new epoch when
  /// the auditor was inactive). C deactivates once every record of the
  /// epoch has been acknowledged; until then the auditor stays active.
  bool set_active(TzState state);

  bool active() const noexcept { return buf_.active; }
  std::uint64_t epoch() const noexcept { return epoch_; }
  TzState tz_state() const noexcept { return state_; }

  /// Throws Error{InactiveAuditor} when inactive.
  const AuditRecord& record(AuditActor actor, AuditKind kind, const UeId& ue_id,
                            std::string outcome, SimTime now);

  AuditBatch pending_batch() const;
  bool fully_delivered() const noexcept;

  /// Applies an acknowledgment. Returns how many records became delivered.
  std::size_t acknowledge(const AuditAck& ack);

  /// Pushes every undelivered record in seq order. Allowed in R, and in C
  /// while a push started in R is still unacknowledged. Throws
  /// Error{NoConnectivity} otherwise.
  std::size_t push_to_center(AuditCenterEndpoint& center);

  /// Read-only range query for the center, C only (Error{WrongState}).
  std::vector<AuditRecord> serve_pull(std::uint64_t from_seq) const;

  // Drops delivered records from the buffer. Returns how many were removed.
  std::size_t compact();

  const AuditBufferState& buffer() const noexcept { return buf_; }
  std::uint64_t max_seq() const noexcept { return next_seq_ - 1; }

 private:
  void maybe_deactivate();

  AuditBufferState buf_;
  TzState state_ = TzState::C;
  std::uint64_t epoch_ = 0;
  std::uint64_t next_seq_ = 1;
};

}  // namespace tz

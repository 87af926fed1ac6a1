#include "tz/audit.hpp"

#include <algorithm>
#include <stdexcept>

#include "tz/errors.hpp"

namespace tz {

std::string_view to_string(AuditActor a) noexcept { return a == AuditActor::Zm ? "ZM" : "LAA"; }

std::string_view to_string(AuditKind k) noexcept {
  switch (k) {
    case AuditKind::AccessDecision: return "AccessDecision";
    case AuditKind::LocalAuthenticate: return "LocalAuthenticate";
    case AuditKind::KeyDerivation: return "KeyDerivation";
    case AuditKind::TrustChange: return "TrustChange";
    case AuditKind::ForcedDisconnect: return "ForcedDisconnect";
  }
  return "?";
}

std::optional<AuditKind> parse_audit_kind(std::string_view text) noexcept {
  for (auto k : {AuditKind::AccessDecision, AuditKind::LocalAuthenticate,
                 AuditKind::KeyDerivation, AuditKind::TrustChange, AuditKind::ForcedDisconnect}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<AuditActor> parse_audit_actor(std::string_view text) noexcept {
  if (text == "ZM") return AuditActor::Zm;
  if (text == "LAA") return AuditActor::Laa;
  return std::nullopt;
}

std::optional<AuditAck> AuditCenter::deliver(const AuditBatch& batch) {
  for (const auto& r : batch.records) {
    auto key = std::make_pair(r.epoch, r.seq);
    if (index_.contains(key)) {
      ++duplicates_;
      continue;
    }
    index_.emplace(key, records_.size());
    records_.push_back(r);
  }
  return AuditAck{batch.epoch, contiguous_up_to(batch.epoch)};
}

std::uint64_t AuditCenter::contiguous_up_to(std::uint64_t epoch) const {
  std::uint64_t n = 0;
  while (index_.contains({epoch, n + 1})) ++n;
  return n;
}

bool SecurityAuditor::set_active(TzState state) {
  state_ = state;
  if (state == TzState::D && !buf_.active) {
    buf_.active = true;
    ++epoch_;
    next_seq_ = 1;
    buf_.buffered.clear();
    buf_.delivered_up_to = 0;
  }
  maybe_deactivate();
  return buf_.active;
}

void SecurityAuditor::maybe_deactivate() {
  if (state_ == TzState::C && buf_.active && fully_delivered()) buf_.active = false;
}

const AuditRecord& SecurityAuditor::record(AuditActor actor, AuditKind kind, const UeId& ue_id,
                                           std::string outcome, SimTime now) {
  if (!buf_.active) {
    throw Error(ErrorCode::InactiveAuditor,
                std::string(to_string(kind)) + " for " + ue_id + " while auditor inactive");
  }
  AuditRecord r{epoch_, next_seq_++, now, actor, kind, ue_id, std::move(outcome)};
  if (!buf_.buffered.empty() && r.at < buf_.buffered.back().at) {
    throw std::logic_error("audit record timestamp went backwards");
  }
  buf_.buffered.push_back(std::move(r));
  return buf_.buffered.back();
}

AuditBatch SecurityAuditor::pending_batch() const {
  AuditBatch b{epoch_, {}};
  for (const auto& r : buf_.buffered) {
    if (r.seq > buf_.delivered_up_to) b.records.push_back(r);
  }
  return b;
}

bool SecurityAuditor::fully_delivered() const noexcept {
  return buf_.delivered_up_to >= next_seq_ - 1;
}

std::size_t SecurityAuditor::acknowledge(const AuditAck& ack) {
  if (ack.epoch != epoch_) return 0;
  const std::uint64_t target = std::min(ack.up_to, next_seq_ - 1);
  if (target <= buf_.delivered_up_to) return 0;
  const std::size_t n = target - buf_.delivered_up_to;
  buf_.delivered_up_to = target;
  maybe_deactivate();
  return n;
}

std::size_t SecurityAuditor::push_to_center(AuditCenterEndpoint& center) {
  if (state_ != TzState::R && !(state_ == TzState::C && buf_.active)) {
    throw Error(ErrorCode::NoConnectivity,
                "push needs state R, got " + std::string(to_string(state_)));
  }
  AuditBatch batch = pending_batch();
  if (batch.records.empty()) return 0;
  auto ack = center.deliver(batch);
  if (!ack) return 0;
  return acknowledge(*ack);
}

std::vector<AuditRecord> SecurityAuditor::serve_pull(std::uint64_t from_seq) const {
  if (state_ != TzState::C) {
    throw Error(ErrorCode::WrongState,
                "pull is served in C only, not " + std::string(to_string(state_)));
  }
  std::vector<AuditRecord> out;
  for (const auto& r : buf_.buffered) {
    if (r.seq >= from_seq) out.push_back(r);
  }
  return out;
}

std::size_t SecurityAuditor::compact() {
  const auto before = buf_.buffered.size();
  std::erase_if(buf_.buffered,
                [&](const AuditRecord& r) { return r.seq <= buf_.delivered_up_to; });
  return before - buf_.buffered.size();
}

}  // namespace tz

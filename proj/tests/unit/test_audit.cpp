#include <doctest.h>

#include <optional>
#include <vector>

#include "tz/audit.hpp"
#include "tz/errors.hpp"

using namespace tz;

namespace {
// Center stand-in that can lose acknowledgments.
struct LossyCenter final : AuditCenterEndpoint {
  AuditCenter inner;
  int lose = 0;
  std::optional<AuditAck> deliver(const AuditBatch& b) override {
    auto ack = inner.deliver(b);
    if (lose > 0) {
      --lose;
      return std::nullopt;
    }
    return ack;
  }
};

void fill(SecurityAuditor& sa, int n, SimTime at = 0) {
  for (int i = 0; i < n; ++i) sa.record(AuditActor::Laa, AuditKind::LocalAuthenticate, "u", "ok", at);
}
}  // namespace

TEST_CASE("activation across a disconnection") {
  SecurityAuditor sa;
  CHECK_FALSE(sa.active());
  CHECK(sa.set_active(TzState::D));
  CHECK(sa.epoch() == 1);
  CHECK(sa.set_active(TzState::L));
  fill(sa, 2);
  CHECK(sa.set_active(TzState::W));
  CHECK(sa.set_active(TzState::R));
  CHECK(sa.set_active(TzState::C));  // unacknowledged records hold it open
  AuditCenter c;
  CHECK(sa.push_to_center(c) == 2);
  CHECK_FALSE(sa.active());
}

TEST_CASE("record numbering") {
  SecurityAuditor sa;
  CHECK_THROWS_AS(fill(sa, 1), Error);
  sa.set_active(TzState::D);
  const auto& a = sa.record(AuditActor::Zm, AuditKind::TrustChange, "u1", "retained", 10);
  CHECK(a.seq == 1);
  CHECK(a.epoch == 1);
  const auto b = sa.record(AuditActor::Zm, AuditKind::TrustChange, "u2", "retained", 10);
  const auto c = sa.record(AuditActor::Zm, AuditKind::TrustChange, "u3", "retained", 10);
  CHECK(b.seq == 2);
  CHECK(c.seq == 3);
  CHECK(b.at == c.at);
  CHECK_THROWS_AS(sa.record(AuditActor::Zm, AuditKind::TrustChange, "u3", "x", 9),
                  std::logic_error);
}

TEST_CASE("push delivers in order and marks delivery") {
  SecurityAuditor sa;
  sa.set_active(TzState::D);
  sa.set_active(TzState::L);
  fill(sa, 5);
  AuditCenter c;
  CHECK_THROWS_AS(sa.push_to_center(c), Error);  // no link in L
  sa.set_active(TzState::W);
  sa.set_active(TzState::R);
  CHECK(sa.push_to_center(c) == 5);
  REQUIRE(c.records().size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(c.records()[i].seq == i + 1);
  CHECK(sa.buffer().delivered_up_to == 5);
  CHECK(sa.fully_delivered());
  CHECK(sa.push_to_center(c) == 0);
}

TEST_CASE("lost ack and retry store each record once") {
  SecurityAuditor sa;
  sa.set_active(TzState::D);
  fill(sa, 4);
  sa.set_active(TzState::L);
  sa.set_active(TzState::W);
  sa.set_active(TzState::R);
  LossyCenter c;
  c.lose = 1;
  CHECK(sa.push_to_center(c) == 0);
  CHECK_FALSE(sa.fully_delivered());
  sa.set_active(TzState::C);
  CHECK(sa.active());
  CHECK(sa.push_to_center(c) == 4);  // retry in C
  CHECK(c.inner.records().size() == 4);
  CHECK(c.inner.duplicates() == 4);
  CHECK(c.inner.contiguous_up_to(1) == 4);
  CHECK_FALSE(sa.active());
}

TEST_CASE("center contiguity with a gap") {
  AuditCenter c;
  AuditBatch b{1, {{1, 1, 0, AuditActor::Zm, AuditKind::TrustChange, "u", "x"},
                   {1, 3, 0, AuditActor::Zm, AuditKind::TrustChange, "u", "x"}}};
  auto ack = c.deliver(b);
  REQUIRE(ack);
  CHECK(ack->up_to == 1);
  CHECK(c.contiguous_up_to(1) == 1);
  CHECK(c.contiguous_up_to(2) == 0);
}

TEST_CASE("serve_pull range reads") {
  SecurityAuditor sa;
  sa.set_active(TzState::D);
  fill(sa, 5);
  sa.set_active(TzState::L);
  CHECK_THROWS_AS(sa.serve_pull(1), Error);
  sa.set_active(TzState::W);
  sa.set_active(TzState::R);
  sa.set_active(TzState::C);
  auto r = sa.serve_pull(3);
  REQUIRE(r.size() == 3);
  CHECK(r.front().seq == 3);
  CHECK(r.back().seq == 5);
  CHECK(sa.serve_pull(6).empty());
}

TEST_CASE("new epoch after a completed cycle") {
  SecurityAuditor sa;
  AuditCenter c;
  sa.set_active(TzState::D);
  fill(sa, 1);
  sa.set_active(TzState::L);
  sa.set_active(TzState::W);
  sa.set_active(TzState::R);
  sa.push_to_center(c);
  sa.set_active(TzState::C);
  CHECK_FALSE(sa.active());
  sa.set_active(TzState::D);
  CHECK(sa.epoch() == 2);
  CHECK(sa.record(AuditActor::Zm, AuditKind::TrustChange, "u", "x", 0).seq == 1);
  CHECK(sa.compact() == 0);
}

TEST_CASE("names") {
  for (auto k : {AuditKind::AccessDecision, AuditKind::LocalAuthenticate, AuditKind::KeyDerivation,
                 AuditKind::TrustChange, AuditKind::ForcedDisconnect})
    CHECK(parse_audit_kind(to_string(k)) == k);
  CHECK(parse_audit_actor("ZM") == AuditActor::Zm);
  CHECK(parse_audit_actor("LAA") == AuditActor::Laa);
}

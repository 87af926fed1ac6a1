#include "tz/sim/central_cloud.hpp"

#include "tz/crypto.hpp"
#include "tz/errors.hpp"
#include "tz/overloaded.hpp"

namespace tz::sim {

SubscriberProfile make_profile(const SubscriberEntry& e) {
  SubscriberProfile p;
  p.subscriber_id = e.id;
  p.credential_digest = credential_digest(e.credential);
  p.security_log_version = e.security_log_version;
  p.sync_version = e.sync_version;
  return p;
}

CentralCloud::CentralCloud(Scheduler& scheduler, Interconnect& bus, TraceSink& trace,
                           const Scenario& scenario)
    : sched_(scheduler), bus_(bus), trace_(trace), sync_period_(scenario.config.sync_period) {
  for (const auto& s : scenario.subscribers) db_.emplace(s.id, make_profile(s));
  lss_.insert(scenario.lss.begin(), scenario.lss.end());

  for (Entity e : {Entity::Oss, Entity::Mano, Entity::Amf, Entity::Lss}) {
    bus_.attach(e, [this, e](const Envelope& env) { on_envelope(e, env); });
  }
  bus_.attach_audit_center([this](const AuditBatch& b, SimTime now) { on_batch(b, now); });
}

void CentralCloud::start() {
  sched_.schedule(sched_.now() + sync_period_, [this] { sync_tick(); });
}

OracleAnswer CentralCloud::central_vaaa_oracle(const UeId& ue_id, const std::string& credential,
                                               Ec4Class link) const {
  if (link == Ec4Class::Lost) {
    throw Error(ErrorCode::Unreachable, "central V-AAA unreachable for " + ue_id);
  }
  auto it = db_.find(ue_id);
  if (it == db_.end()) return OracleAnswer::Reject;
  return it->second.credential_digest == credential_digest(credential) ? OracleAnswer::Accept
                                                                       : OracleAnswer::Reject;
}

void CentralCloud::apply_update(const CentralProfileUpdate& update) {
  SubscriberProfile p = make_profile(update.profile);
  auto it = db_.find(p.subscriber_id);
  if (it != db_.end()) p.key_counter = it->second.key_counter;
  db_.insert_or_assign(p.subscriber_id, std::move(p));
  if (update.in_lss) lss_.insert(update.profile.id);
  else lss_.erase(update.profile.id);
}

std::vector<SubscriberProfile> CentralCloud::lss_snapshot() const {
  std::vector<SubscriberProfile> out;
  for (const auto& id : lss_) {
    if (auto it = db_.find(id); it != db_.end()) out.push_back(it->second);
  }
  return out;
}

void CentralCloud::sync_tick() {
  bus_.send({InterfaceName::LaLs, Entity::Lss, ProfileSnapshot{lss_snapshot()}, sched_.now()});
  sched_.schedule(sched_.now() + sync_period_, [this] { sync_tick(); });
}

void CentralCloud::on_envelope(Entity self, const Envelope& env) {
  const SimTime now = sched_.now();
  std::visit(
      overloaded{
          [&](const ProbeRequest& m) {
            // The probe target answers with what it sees of the link.
            const InterfaceName back =
                self == Entity::Oss ? InterfaceName::OsCm : InterfaceName::CmMa;
            bus_.send({back, self, ProbeReply{m.poll, bus_.link()}, now});
          },
          [&](const DiagnosisNotice& m) { diagnoses_.push_back(m.diagnosis); },
          [&](const CentralAuthRequest& m) {
            const bool ok = central_vaaa_oracle(m.ue_id, m.credential, bus_.link_class()) ==
                            OracleAnswer::Accept;
            bus_.send({InterfaceName::MeZm, Entity::Amf,
                       CentralAuthAnswer{m.ue_id, m.request_id, ok}, now});
          },
          [&](const KeyRequest& m) {
            auto it = db_.find(m.ue_id);
            if (it == db_.end()) return;
            const std::uint64_t counter = amf_counters_[m.ue_id]++;
            // Central key hierarchy root, kept apart from the LAA derivation.
            Bytes root = it->second.credential_digest;
            root.insert(root.begin(), {'A', 'M', 'F'});
            bus_.send({InterfaceName::MeZm, Entity::Amf,
                       KeyToken{m.ue_id, KeyOrigin::Amf, counter, derive_token_bytes(root, counter)},
                       now});
          },
          [](const auto&) {},
      },
      env.payload);
}

void CentralCloud::on_batch(const AuditBatch& batch, SimTime now) {
  const std::size_t before = center_.records().size();
  const std::size_t dup_before = center_.duplicates();
  auto ack = center_.deliver(batch);
  Json body;
  body["kind"] = "audit_center";
  body["epoch"] = batch.epoch;
  body["received"] = batch.records.size();
  body["stored"] = center_.records().size() - before;
  body["duplicates"] = center_.duplicates() - dup_before;
  body["contiguous_up_to"] = center_.contiguous_up_to(batch.epoch);
  trace_.emit(now, TraceCategory::Metric, std::move(body));
  if (ack) bus_.send_audit_ack(*ack, now);
}

}  // namespace tz::sim

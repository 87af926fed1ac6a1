#include "tz/trust_zone.hpp"

#include "tz/errors.hpp"
#include "tz/overloaded.hpp"

namespace tz {

namespace {

Json sample_json(const Ec4Sample& s) {
  Json j;
  j["at"] = s.at;
  j["reachable"] = s.reachable;
  if (s.latency_ms) j["latency_ms"] = *s.latency_ms;
  else j["latency_ms"] = nullptr;
  j["loss_rate"] = s.loss_rate;
  j["throughput"] = s.throughput;
  return j;
}

}  // namespace

// --- CCCM -------------------------------------------------------------------

CccmAgent::CccmAgent(CccmConfig config, Scheduler& scheduler, Interconnect& bus, TraceSink& trace)
    : config_(config), sched_(scheduler), bus_(bus), trace_(trace), monitor_(config.thresholds) {}

void CccmAgent::start(SimTime first_poll) {
  sched_.schedule(first_poll, [this] { poll(); });
}

void CccmAgent::poll() {
  const SimTime now = sched_.now();
  const std::uint64_t n = next_poll_++;
  polls_[n].at = now;
  bus_.send({InterfaceName::OsCm, Entity::Cccm, ProbeRequest{n}, now});
  bus_.send({InterfaceName::CmMa, Entity::Cccm, ProbeRequest{n}, now});
  sched_.schedule(now + config_.probe_timeout, [this, n] { collect(n); });
  sched_.schedule(now + config_.poll_period, [this] { poll(); });
}

void CccmAgent::collect(std::uint64_t poll_no) {
  auto node = polls_.extract(poll_no);
  if (node.empty()) return;
  const Poll& p = node.mapped();
  const Ec4Sample sample = poll_sources(p.oss, p.mano, p.at);
  const auto cls = monitor_.ingest(sample);

  Json body;
  body["kind"] = "ec4_sample";
  body["poll"] = poll_no;
  body["sample"] = sample_json(sample);
  body["class"] = cls ? Json(std::string(to_string(*cls))) : Json(nullptr);
  trace_.emit(sched_.now(), TraceCategory::Metric, std::move(body));

  if (cls) bus_.send({InterfaceName::CmZm, Entity::Cccm, Ec4Report{*cls}, sched_.now()});
  if (state_ == TzState::W || state_ == TzState::L) maybe_diagnose(false);
}

std::vector<DisasterEvent> CccmAgent::active_disasters(SimTime now) const {
  std::vector<DisasterEvent> out;
  for (const auto& [id, ev] : disasters_) {
    if (ev.active_at(now)) out.push_back(ev);
  }
  return out;
}

void CccmAgent::maybe_diagnose(bool force) {
  if (monitor_.window().empty()) return;
  const SimTime now = sched_.now();
  const auto active = active_disasters(now);
  Diagnosis d = monitor_.diagnose(active, state_, now);
  if (!force && last_hypothesis_ == d.hypothesis) return;
  last_hypothesis_ = d.hypothesis;
  diagnoses_.push_back(d);
  bus_.send({InterfaceName::CmMa, Entity::Cccm, DiagnosisNotice{std::move(d)}, now});
}

void CccmAgent::on_envelope(const Envelope& env) {
  std::visit(overloaded{
                 [&](const ProbeReply& m) {
                   auto it = polls_.find(m.poll);
                   if (it == polls_.end()) return;  // answered after the deadline
                   if (env.iface == InterfaceName::OsCm) it->second.oss = m.reading;
                   else it->second.mano = m.reading;
                 },
                 [&](const DisasterAlarm& m) { disasters_.emplace(m.event.event_id, m.event); },
                 [&](const StateNotice& m) {
                   state_ = m.state;
                   bus_.set_priority_hints(priority_hints(m.state), sched_.now());
                   if (m.state == TzState::W || m.state == TzState::L) maybe_diagnose(true);
                   else last_hypothesis_.reset();
                 },
                 [](const auto&) {},
             },
             env.payload);
}

// --- ES ---------------------------------------------------------------------

EsAgent::EsAgent(Scheduler& scheduler, Interconnect& bus, TraceSink& trace, EmergencyServices& es)
    : sched_(scheduler), bus_(bus), trace_(trace), es_(es) {}

void EsAgent::on_envelope(const Envelope& env) {
  std::visit(overloaded{
                 [&](const DisasterAlarm& m) {
                   if (!es_.on_disaster(m.event)) {
                     Json body;
                     body["kind"] = "disaster_duplicate";
                     body["event_id"] = m.event.event_id;
                     trace_.emit(sched_.now(), TraceCategory::Metric, std::move(body));
                     return;
                   }
                   ++forwarded_;
                   bus_.send({InterfaceName::EsCm, Entity::Es, m, sched_.now()});
                   const SimTime end = std::max(sched_.now(), m.event.at + m.event.ttl);
                   sched_.schedule(end, [this] {
                     for (const auto& id : es_.expire(sched_.now())) {
                       Json body;
                       body["kind"] = "disaster_expired";
                       body["event_id"] = id;
                       trace_.emit(sched_.now(), TraceCategory::Metric, std::move(body));
                     }
                   });
                 },
                 [&](const StateNotice& m) { es_.on_state(m.state); },
                 [](const auto&) {},
             },
             env.payload);
}

// --- audit shipping ---------------------------------------------------------

AuditShipper::AuditShipper(Scheduler& scheduler, Interconnect& bus, TraceSink& trace,
                           SecurityAuditor& sa, SimTime retry_interval)
    : sched_(scheduler), bus_(bus), trace_(trace), sa_(sa), retry_(retry_interval) {}

bool AuditShipper::may_push() const {
  const TzState s = sa_.tz_state();
  return sa_.active() && !sa_.fully_delivered() && (s == TzState::R || s == TzState::C);
}

void AuditShipper::on_state(TzState s) {
  if (s == TzState::R) push();
}

void AuditShipper::on_record() {
  if (!retry_armed_) push();
}

void AuditShipper::push() {
  if (!may_push()) return;
  ++batches_;
  bus_.send_audit_batch(sa_.pending_batch(), sched_.now());
  arm_retry();
}

void AuditShipper::arm_retry() {
  if (retry_armed_) return;
  retry_armed_ = true;
  sched_.schedule(sched_.now() + retry_, [this] {
    retry_armed_ = false;
    push();
  });
}

void AuditShipper::on_ack(const AuditAck& ack, SimTime now) {
  const std::size_t newly = sa_.acknowledge(ack);
  Json body;
  body["kind"] = "audit_ack";
  body["epoch"] = ack.epoch;
  body["up_to"] = ack.up_to;
  body["newly_delivered"] = newly;
  body["auditor_active"] = sa_.active();
  trace_.emit(now, TraceCategory::Metric, std::move(body));
}

// --- assembly ---------------------------------------------------------------

TrustZone::TrustZone(TrustZoneConfig config, Scheduler& scheduler, Interconnect& bus,
                     TraceSink& trace, std::vector<SubscriberProfile> lss_profiles)
    : sched_(scheduler),
      bus_(bus),
      trace_(trace),
      es_(default_catalog(), config.restricted),
      laa_(std::move(lss_profiles),
           [this](AuditKind kind, const UeId& ue, std::string_view outcome) {
             zm_->report_laa_operation(kind, ue, outcome);
           }),
      zm_(std::make_unique<ZoneManager>(config.zone, scheduler, bus, trace, laa_, sa_, es_)),
      cccm_(config.cccm, scheduler, bus, trace),
      es_agent_(scheduler, bus, trace, es_),
      shipper_(scheduler, bus, trace, sa_, config.audit_retry) {
  bus_.attach(Entity::Zm, [this](const Envelope& e) { zm_->on_envelope(e); });
  bus_.attach(Entity::Cccm, [this](const Envelope& e) { cccm_.on_envelope(e); });
  bus_.attach(Entity::Es, [this](const Envelope& e) { es_agent_.on_envelope(e); });
  bus_.attach(Entity::Laa, [this](const Envelope& e) { on_laa_envelope(e); });
  bus_.attach_audit_auditor([this](const AuditAck& a, SimTime now) { shipper_.on_ack(a, now); });
  zm_->set_state_listener([this](const TransitionRecord& r) { shipper_.on_state(r.to); });
  zm_->set_record_listener([this](const AuditRecord&) { shipper_.on_record(); });
}

void TrustZone::start() { cccm_.start(sched_.now()); }

void TrustZone::on_laa_envelope(const Envelope& env) {
  const auto* snap = std::get_if<ProfileSnapshot>(&env.payload);
  if (!snap) return;
  Json body;
  try {
    const SyncReport rep = laa_.sync_profiles(snap->profiles, sched_.now());
    body["kind"] = "lss_sync";
    body["applied"] = rep.applied;
    body["skipped"] = rep.skipped;
    trace_.emit(sched_.now(), TraceCategory::Metric, std::move(body));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoConnectivity) throw;
    body["reason"] = "no_connectivity";
    body["interface"] = std::string(to_string(env.iface));
    body["kind"] = "ProfileSnapshot";
    trace_.emit(sched_.now(), TraceCategory::Drop, std::move(body));
  }
}

}  // namespace tz

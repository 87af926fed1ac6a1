#include "tz/zone_manager.hpp"

#include "tz/errors.hpp"
#include "tz/overloaded.hpp"

namespace tz {

namespace {

Json strings_json(const std::set<std::string>& s) {
  Json a = Json::array();
  for (const auto& x : s) a.push_back(x);
  return a;
}

std::string cause_string(const TransitionCause& c) {
  if (const auto* e = std::get_if<Ec4Class>(&c)) return std::string(to_string(*e));
  return "resolution";
}

}  // namespace

ZoneManager::ZoneManager(ZoneConfig config, Scheduler& scheduler, Interconnect& bus,
                         TraceSink& trace, LocalAccess& laa, SecurityAuditor& sa,
                         EmergencyServices& es)
    : config_(std::move(config)),
      sched_(scheduler),
      bus_(bus),
      trace_(trace),
      laa_(laa),
      sa_(sa),
      es_(es),
      driver_(TzState::C, config_.transient_dwell) {}

void ZoneManager::on_envelope(const Envelope& env) {
  std::visit(overloaded{
                 [&](const Ec4Report& m) { on_ec4_report(m.ec4, sched_.now()); },
                 [&](const CentralAuthAnswer& m) { on_central_answer(m); },
                 [&](const KeyToken& m) { on_amf_key(m); },
                 [&](const AttachRequest& m) { on_attach(m); },
                 [&](const DetachNotice& m) { on_detach(m); },
                 [&](const AccessRequest& m) {
                   try {
                     handle_access_request(m.ue_id, m.service);
                   } catch (const Error& e) {
                     if (e.code() != ErrorCode::UnknownUe) throw;
                     Json body;
                     body["interface"] = "Zm-Ue";
                     body["reason"] = "unknown_ue";
                     body["ue"] = m.ue_id;
                     body["service"] = m.service;
                     trace_.emit(sched_.now(), TraceCategory::Drop, std::move(body));
                   }
                 },
                 [](const auto&) {},
             },
             env.payload);
}

// --- state handling ---------------------------------------------------------

std::optional<TransitionRecord> ZoneManager::on_ec4_report(Ec4Class report, SimTime /*now*/) {
  auto rec = driver_.apply(report, sched_.now());
  if (rec) apply_transition(*rec);
  return rec;
}

void ZoneManager::resolve_due() {
  auto due = driver_.resolution_due();
  if (!due || *due != sched_.now()) return;
  if (auto rec = driver_.resolve(sched_.now())) apply_transition(*rec);
}

void ZoneManager::notify_state(TzState s) {
  const SimTime now = sched_.now();
  bus_.record_local({InterfaceName::ZmLa, Entity::Zm, StateNotice{s}, now});
  laa_.set_activation(s);
  bus_.record_local({InterfaceName::ZmSa, Entity::Zm, StateNotice{s}, now});
  sa_.set_active(s);
  bus_.send({InterfaceName::EsZm, Entity::Zm, StateNotice{s}, now});
  bus_.send({InterfaceName::CmZm, Entity::Zm, StateNotice{s}, now});
}

void ZoneManager::apply_transition(const TransitionRecord& rec) {
  const SimTime now = sched_.now();
  transitions_.push_back(rec);
  Json body;
  body["from"] = std::string(to_string(rec.from));
  body["to"] = std::string(to_string(rec.to));
  body["cause"] = cause_string(rec.cause);
  trace_.emit(now, TraceCategory::Transition, std::move(body));

  notify_state(rec.to);

  switch (rec.to) {
    case TzState::D:
      ++schedule_generation_;  // a pending flush no longer applies
      on_disconnect(now);
      break;
    case TzState::R:
      on_reconnect(now, trusted_devices(devices_));
      break;
    case TzState::L: {
      auto parked = std::move(deferred_);
      deferred_.clear();
      for (const auto& p : parked) {
        try {
          handle_access_request(p.ue_id, p.service);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::UnknownUe) throw;
        }
      }
      break;
    }
    case TzState::C:
    case TzState::W:
      break;
  }

  if (is_transient(rec.to)) {
    sched_.schedule(*driver_.resolution_due(), [this] { resolve_due(); });
  }
  if (state_listener_) state_listener_(rec);
}

std::set<UeId> ZoneManager::on_disconnect(SimTime /*now*/) {
  // Central authentications that have not completed lose their answer
  // together with the link. They are re-examined locally once in L.
  std::set<UeId> in_flight;
  for (auto& [id, p] : pending_) {
    in_flight.insert(p.ue_id);
    deferred_.push_back(std::move(p));
  }
  pending_.clear();

  auto trusted = retain_trust(devices_, in_flight);
  for (const auto& id : trusted) {
    report_op(AuditActor::Zm, AuditKind::TrustChange, id, "retained",
              {{"origin", std::string(to_string(devices_.at(id).auth_origin))}});
  }
  return trusted;
}

ReauthSchedule ZoneManager::on_reconnect(SimTime now, const std::set<UeId>& trusted) {
  schedule_ = build_reauth_schedule(devices_, trusted, now, config_.reauth_stagger);
  const std::uint64_t gen = ++schedule_generation_;

  Json entries = Json::array();
  for (std::size_t i = 0; i < schedule_.entries.size(); ++i) {
    const auto& e = schedule_.entries[i];
    Json je;
    je["ue"] = e.ue_id;
    je["disconnect_at"] = e.disconnect_at;
    je["origin"] = std::string(to_string(e.origin));
    entries.push_back(std::move(je));
    sched_.schedule(e.disconnect_at, [this, gen, i] { execute_reauth(gen, i); });
  }
  Json body;
  body["kind"] = "reauth_schedule";
  body["entries"] = std::move(entries);
  trace_.emit(now, TraceCategory::Metric, std::move(body));
  return schedule_;
}

void ZoneManager::execute_reauth(std::uint64_t generation, std::size_t index) {
  if (generation != schedule_generation_) return;
  const ReauthEntry& entry = schedule_.entries.at(index);
  auto it = devices_.find(entry.ue_id);
  if (it == devices_.end() || !it->second.attached || it->second.trust != Trust::Trusted) {
    Json body;
    body["kind"] = "reauth_skipped";
    body["ue"] = entry.ue_id;
    trace_.emit(sched_.now(), TraceCategory::Metric, std::move(body));
    return;
  }
  DeviceRecord& dev = it->second;
  const AuthOrigin previous = dev.auth_origin;
  dev.attached = false;
  dev.trust = Trust::Untrusted;
  dev.auth_origin = AuthOrigin::None;
  dev.granted.clear();
  std::erase_if(pending_, [&](const auto& kv) { return kv.second.ue_id == entry.ue_id; });

  report_op(AuditActor::Zm, AuditKind::ForcedDisconnect, entry.ue_id, "scheduled",
            {{"origin", std::string(to_string(previous))}});
  bus_.send({InterfaceName::ZmUe, Entity::Zm, ForcedDetach{entry.ue_id}, sched_.now()});
}

// --- devices ----------------------------------------------------------------

void ZoneManager::on_attach(const AttachRequest& m) {
  DeviceRecord& dev = devices_[m.ue_id];
  if (dev.trust == Trust::Trusted) {
    set_trust(dev, Trust::Untrusted, AuthOrigin::None, "reattached");
  }
  dev.ue_id = m.ue_id;
  dev.attached = true;
  dev.trust = Trust::Untrusted;
  dev.auth_origin = AuthOrigin::None;
  dev.granted.clear();
  credentials_[m.ue_id] = m.credential;
}

void ZoneManager::on_detach(const DetachNotice& m) {
  auto it = devices_.find(m.ue_id);
  if (it == devices_.end()) return;
  DeviceRecord& dev = it->second;
  if (dev.trust == Trust::Trusted) set_trust(dev, Trust::Untrusted, AuthOrigin::None, "detached");
  dev.attached = false;
  dev.auth_origin = AuthOrigin::None;
  dev.granted.clear();
  std::erase_if(pending_, [&](const auto& kv) { return kv.second.ue_id == m.ue_id; });
  std::erase_if(deferred_, [&](const PendingAuth& p) { return p.ue_id == m.ue_id; });
}

void ZoneManager::set_trust(DeviceRecord& dev, Trust trust, AuthOrigin origin,
                            std::string outcome) {
  dev.trust = trust;
  dev.auth_origin = origin;
  report_op(AuditActor::Zm, AuditKind::TrustChange, dev.ue_id, std::move(outcome),
            {{"trust", to_string(trust)}, {"origin", std::string(to_string(origin))}});
}

// --- access -----------------------------------------------------------------

std::optional<AccessDecision> ZoneManager::handle_access_request(const UeId& ue_id,
                                                                 const std::string& service) {
  auto it = devices_.find(ue_id);
  if (it == devices_.end() || !it->second.attached) {
    throw Error(ErrorCode::UnknownUe, ue_id + " is not attached");
  }
  DeviceRecord& dev = it->second;
  const TzState s = state();

  if (dev.trust == Trust::Trusted) return finish(dev, grant_full(dev, service, "retained"));

  if (const auto* svc = es_.find(service);
      svc && svc->service_class == ServiceClass::AlwaysNoAuth) {
    auto d = grant_emergency(dev, service, "no_auth_service");
    d.route = Route::None;
    return finish(dev, std::move(d));
  }

  switch (s) {
    case TzState::C:
    case TzState::W:
    case TzState::R: {
      const std::uint64_t id = next_request_id_++;
      pending_.emplace(id, PendingAuth{ue_id, service});
      bus_.send({InterfaceName::MeZm, Entity::Zm,
                 CentralAuthRequest{ue_id, id, credentials_[ue_id]}, sched_.now()});
      sched_.schedule(sched_.now() + config_.central_auth_timeout,
                      [this, id] { on_central_timeout(id); });
      return std::nullopt;
    }
    case TzState::D: {
      deferred_.push_back({ue_id, service});
      Json body;
      body["kind"] = "request_deferred";
      body["ue"] = ue_id;
      body["service"] = service;
      trace_.emit(sched_.now(), TraceCategory::Metric, std::move(body));
      return std::nullopt;
    }
    case TzState::L:
      return decide_local(dev, service);
  }
  return std::nullopt;
}

AccessDecision ZoneManager::decide_local(DeviceRecord& dev, const std::string& service) {
  const SimTime now = sched_.now();
  bus_.record_local({InterfaceName::ZmLa, Entity::Zm, LocalAuthRequest{dev.ue_id}, now});
  const Trust t = laa_.local_authenticate(dev.ue_id, credentials_[dev.ue_id]);
  bus_.record_local({InterfaceName::ZmLa, Entity::Laa, LocalAuthResult{dev.ue_id, t}, now});

  if (t != Trust::Trusted) return fallback(dev, service, "local_auth_failed");

  set_trust(dev, Trust::Trusted, AuthOrigin::Local, "trusted_local");
  dev.last_auth_at = now;
  AccessDecision d = finish(dev, grant_full(dev, service, "local_auth"));
  as_security_procedure(dev.ue_id);
  return d;
}

AccessDecision ZoneManager::fallback(DeviceRecord& dev, const std::string& service,
                                     std::string reason) {
  const TzState s = state();
  const auto pd = es_.decide(service, s, Trust::Untrusted, sched_.now());
  const bool open = pd && pd->verdict != PolicyVerdict::Inactive && !pd->requires_auth;
  const bool local = route_for(s) == Route::LocalLaa;

  if (pd && pd->verdict == PolicyVerdict::AllowRestricted &&
      !es_.admit_restricted(dev.ue_id, service, sched_.now())) {
    return finish(dev, deny(dev, service, "rate_limited"));
  }
  // Without the central cloud an unverified device still gets the emergency
  // set; with it, only an open emergency service is worth granting.
  if (local || open) return finish(dev, grant_emergency(dev, service, std::move(reason)));
  return finish(dev, deny(dev, service, std::move(reason)));
}

std::set<std::string> ZoneManager::full_grant_set() const {
  std::set<std::string> out = config_.full_services;
  for (const auto& d : es_.available_services(state(), Trust::Trusted, sched_.now())) {
    if (d.verdict != PolicyVerdict::Inactive) out.insert(d.service);
  }
  return out;
}

std::set<std::string> ZoneManager::emergency_grant_set() const {
  const auto decisions = es_.available_services(state(), Trust::Untrusted, sched_.now());
  return open_services(decisions);
}

AccessDecision ZoneManager::grant_full(DeviceRecord& dev, const std::string& service,
                                       std::string reason) {
  AccessDecision d;
  d.verdict = Verdict::GrantFull;
  d.route = route_for(state());
  d.reason = std::move(reason);
  auto full = full_grant_set();
  if (d.reason == "retained") {
    // Retained access keeps what the device already held.
    full.insert(dev.granted.begin(), dev.granted.end());
  }
  dev.granted = full;
  d.service = service;
  d.granted = std::move(full);
  return d;
}

AccessDecision ZoneManager::grant_emergency(DeviceRecord& dev, const std::string& service,
                                            std::string reason) {
  AccessDecision d;
  d.service = service;
  d.verdict = Verdict::GrantEmergencyOnly;
  d.route = route_for(state());
  d.reason = std::move(reason);
  d.granted = emergency_grant_set();
  if (config_.inject_untrusted_grant) {
    d.granted.insert(config_.full_services.begin(), config_.full_services.end());
  }
  dev.granted = d.granted;
  return d;
}

AccessDecision ZoneManager::deny(DeviceRecord& dev, const std::string& service,
                                 std::string reason) {
  AccessDecision d;
  d.service = service;
  d.verdict = Verdict::Deny;
  d.route = Route::None;
  d.reason = std::move(reason);
  d.granted = dev.granted;
  return d;
}

AccessDecision ZoneManager::finish(DeviceRecord& dev, AccessDecision d) {
  d.ue_id = dev.ue_id;
  d.state = state();
  d.at = sched_.now();
  Json detail;
  detail["service"] = d.service;
  detail["verdict"] = std::string(to_string(d.verdict));
  detail["route"] = std::string(to_string(d.route));
  detail["reason"] = d.reason;
  detail["granted"] = strings_json(d.granted);
  detail["trust"] = to_string(dev.trust);
  detail["origin"] = std::string(to_string(dev.auth_origin));
  report_op(AuditActor::Zm, AuditKind::AccessDecision, dev.ue_id,
            std::string(to_string(d.verdict)), std::move(detail));
  bus_.send({InterfaceName::ZmUe, Entity::Zm,
             AccessResponse{dev.ue_id, d.service, d.verdict, d.route, d.reason}, sched_.now()});
  return d;
}

void ZoneManager::on_central_answer(const CentralAuthAnswer& m) {
  auto it = pending_.find(m.request_id);
  if (it == pending_.end()) {
    Json body;
    body["interface"] = "Me-Zm";
    body["reason"] = "stale_answer";
    body["ue"] = m.ue_id;
    body["request_id"] = m.request_id;
    trace_.emit(sched_.now(), TraceCategory::Drop, std::move(body));
    return;
  }
  PendingAuth p = std::move(it->second);
  pending_.erase(it);
  auto dev_it = devices_.find(p.ue_id);
  if (dev_it == devices_.end() || !dev_it->second.attached) return;
  DeviceRecord& dev = dev_it->second;

  if (!m.accepted) {
    fallback(dev, p.service, "central_reject");
    return;
  }
  if (dev.trust != Trust::Trusted) {
    set_trust(dev, Trust::Trusted, AuthOrigin::Central, "trusted_central");
  }
  dev.last_auth_at = sched_.now();
  finish(dev, grant_full(dev, p.service, "central_accept"));
  as_security_procedure(dev.ue_id);
}

void ZoneManager::on_central_timeout(std::uint64_t request_id) {
  auto it = pending_.find(request_id);
  if (it == pending_.end()) return;
  PendingAuth p = std::move(it->second);
  pending_.erase(it);
  auto dev_it = devices_.find(p.ue_id);
  if (dev_it == devices_.end() || !dev_it->second.attached) return;
  fallback(dev_it->second, p.service, "central_timeout");
}

void ZoneManager::on_amf_key(const KeyToken& m) {
  auto it = devices_.find(m.ue_id);
  if (it == devices_.end() || !it->second.attached || it->second.trust != Trust::Trusted) {
    Json body;
    body["interface"] = "Me-Zm";
    body["reason"] = "stale_key";
    body["ue"] = m.ue_id;
    trace_.emit(sched_.now(), TraceCategory::Drop, std::move(body));
    return;
  }
  bus_.send({InterfaceName::ZmUe, Entity::Zm,
             SecurityModeCommand{m.ue_id, KeyOrigin::Amf, m.counter}, sched_.now()});
}

std::optional<AsKeyToken> ZoneManager::as_security_procedure(const UeId& ue_id) {
  auto it = devices_.find(ue_id);
  if (it == devices_.end() || it->second.trust != Trust::Trusted) {
    throw Error(ErrorCode::NotTrusted, ue_id + " is not a trusted device");
  }
  const SimTime now = sched_.now();
  if (route_for(state()) == Route::CentralVaaa) {
    bus_.send({InterfaceName::MeZm, Entity::Zm, KeyRequest{ue_id}, now});
    return std::nullopt;
  }
  if (!laa_.operational()) {
    throw Error(ErrorCode::LaaInactive,
                "LAA is " + std::string(to_string(laa_.activation())) + " for " + ue_id);
  }
  bus_.record_local({InterfaceName::ZmLa, Entity::Zm, KeyRequest{ue_id}, now});
  AsKeyToken tok = laa_.derive_as_key(ue_id);
  bus_.record_local(
      {InterfaceName::ZmLa, Entity::Laa, KeyToken{ue_id, KeyOrigin::Laa, tok.counter, tok.token},
       now});
  bus_.send(
      {InterfaceName::ZmUe, Entity::Zm, SecurityModeCommand{ue_id, KeyOrigin::Laa, tok.counter},
       now});
  return tok;
}

// --- operation log ----------------------------------------------------------

void ZoneManager::report_laa_operation(AuditKind kind, const UeId& ue_id,
                                       std::string_view outcome) {
  report_op(AuditActor::Laa, kind, ue_id, std::string(outcome));
}

void ZoneManager::report_op(AuditActor actor, AuditKind kind, const UeId& ue_id,
                            std::string outcome, Json detail) {
  const SimTime now = sched_.now();
  Json body;
  body["op"] = std::string(to_string(kind));
  body["actor"] = std::string(to_string(actor));
  body["ue"] = ue_id;
  body["state"] = std::string(to_string(state()));
  body["outcome"] = outcome;
  for (auto& [k, v] : detail.items()) body[k] = v;

  std::optional<AuditRecord> rec;
  if (sa_.active()) {
    const bool zm = actor == AuditActor::Zm;
    bus_.record_local({zm ? InterfaceName::ZmSa : InterfaceName::LaSa, zm ? Entity::Zm : Entity::Laa,
                       OperationReport{actor, kind, ue_id, outcome}, now});
    rec = sa_.record(actor, kind, ue_id, outcome, now);
  }
  if (rec) {
    body["audit"] = {{"epoch", rec->epoch}, {"seq", rec->seq}};
  } else {
    body["audit"] = nullptr;
  }
  trace_.emit(now, TraceCategory::Decision, std::move(body));

  if (rec) {
    Json a;
    a["epoch"] = rec->epoch;
    a["seq"] = rec->seq;
    a["actor"] = std::string(to_string(rec->actor));
    a["kind"] = std::string(to_string(rec->kind));
    a["ue"] = rec->ue_id;
    a["outcome"] = rec->outcome;
    trace_.emit(now, TraceCategory::Audit, std::move(a));
    if (record_listener_) record_listener_(*rec);
  }
}

}  // namespace tz

#include "tz/interconnect.hpp"

#include "tz/errors.hpp"
#include "tz/overloaded.hpp"

namespace tz {

namespace {

using enum Entity;
using enum InterfaceName;

constexpr std::array<Entity, 11> kEntities{Cccm, Zm, Laa, Lss, Sa, Es, Iot, Oss, Mano, Amf, Ue};

struct Permit {
  InterfaceName iface;
  Entity sender;
};

template <std::size_t N>
bool permitted(const std::array<Permit, N>& table, InterfaceName iface, Entity sender) {
  for (const auto& p : table) {
    if (p.iface == iface && p.sender == sender) return true;
  }
  return false;
}

constexpr std::array<Permit, 1> only(InterfaceName i, Entity e) { return {{{i, e}}}; }

}  // namespace

std::string_view to_string(Entity e) noexcept {
  switch (e) {
    case Cccm: return "CCCM";
    case Zm: return "ZM";
    case Laa: return "LAA";
    case Lss: return "LSS";
    case Sa: return "SA";
    case Es: return "ES";
    case Iot: return "IoT";
    case Oss: return "OSS";
    case Mano: return "MANO";
    case Amf: return "AMF";
    case Ue: return "UE";
  }
  return "?";
}

std::string_view to_string(InterfaceName i) noexcept {
  switch (i) {
    case CmMa: return "Cm-Ma";
    case CmZm: return "Cm-Zm";
    case EsCm: return "Es-Cm";
    case EsZm: return "Es-Zm";
    case IoEs: return "Io-Es";
    case LaLs: return "La-Ls";
    case LaSa: return "La-Sa";
    case MeZm: return "Me-Zm";
    case OsCm: return "Os-Cm";
    case ZmLa: return "Zm-La";
    case ZmSa: return "Zm-Sa";
    case ZmUe: return "Zm-Ue";
  }
  return "?";
}

std::optional<InterfaceName> parse_interface(std::string_view text) noexcept {
  for (auto i : kAllInterfaces) {
    if (to_string(i) == text) return i;
  }
  return std::nullopt;
}

std::optional<Entity> parse_entity(std::string_view text) noexcept {
  for (auto e : kEntities) {
    if (to_string(e) == text) return e;
  }
  return std::nullopt;
}

const std::set<Edge>& connectivity_matrix() {
  static const std::set<Edge> edges{
      {Cccm, Mano, CmMa}, {Mano, Cccm, CmMa},  // probe + diagnosis / probe reply
      {Cccm, Zm, CmZm},   {Zm, Cccm, CmZm},    // link report / state transition
      {Es, Cccm, EsCm},                        // disaster forward
      {Zm, Es, EsZm},                          // state transition
      {Iot, Es, IoEs},                         // disaster alarm
      {Lss, Laa, LaLs},                        // synchronized profiles
      {Laa, Sa, LaSa},                         // LAA operation reports
      {Amf, Zm, MeZm},    {Zm, Amf, MeZm},     // AMF keys / central auth
      {Cccm, Oss, OsCm},  {Oss, Cccm, OsCm},   // probe / probe reply
      {Zm, Laa, ZmLa},    {Laa, Zm, ZmLa},     // state, requests / keys, results
      {Zm, Sa, ZmSa},                          // ZM operation reports
      {Zm, Ue, ZmUe},     {Ue, Zm, ZmUe},      // C-plane security procedure
  };
  return edges;
}

std::optional<Entity> receiver_of(InterfaceName iface, Entity sender) noexcept {
  for (const auto& e : connectivity_matrix()) {
    if (e.iface == iface && e.sender == sender) return e.receiver;
  }
  return std::nullopt;
}

bool crosses_ec4(InterfaceName iface) noexcept {
  return iface == CmMa || iface == OsCm || iface == MeZm || iface == LaLs;
}

std::string_view payload_kind(const Payload& p) noexcept {
  return std::visit(
      overloaded{
          [](const ProbeRequest&) { return std::string_view("ProbeRequest"); },
          [](const ProbeReply&) { return std::string_view("ProbeReply"); },
          [](const Ec4Report&) { return std::string_view("Ec4Report"); },
          [](const StateNotice&) { return std::string_view("StateNotice"); },
          [](const DiagnosisNotice&) { return std::string_view("Diagnosis"); },
          [](const DisasterAlarm&) { return std::string_view("DisasterAlarm"); },
          [](const ProfileSnapshot&) { return std::string_view("ProfileSnapshot"); },
          [](const OperationReport&) { return std::string_view("OperationReport"); },
          [](const CentralAuthRequest&) { return std::string_view("CentralAuthRequest"); },
          [](const CentralAuthAnswer&) { return std::string_view("CentralAuthAnswer"); },
          [](const KeyRequest&) { return std::string_view("KeyRequest"); },
          [](const KeyToken&) { return std::string_view("KeyToken"); },
          [](const LocalAuthRequest&) { return std::string_view("LocalAuthRequest"); },
          [](const LocalAuthResult&) { return std::string_view("LocalAuthResult"); },
          [](const AttachRequest&) { return std::string_view("AttachRequest"); },
          [](const DetachNotice&) { return std::string_view("DetachNotice"); },
          [](const AccessRequest&) { return std::string_view("AccessRequest"); },
          [](const AccessResponse&) { return std::string_view("AccessResponse"); },
          [](const SecurityModeCommand&) { return std::string_view("SecurityModeCommand"); },
          [](const ForcedDetach&) { return std::string_view("ForcedDetach"); },
      },
      p);
}

bool payload_allowed(const Payload& p, InterfaceName iface, Entity sender) noexcept {
  return std::visit(
      overloaded{
          [&](const ProbeRequest&) {
            return permitted(std::array<Permit, 2>{{{OsCm, Cccm}, {CmMa, Cccm}}}, iface, sender);
          },
          [&](const ProbeReply&) {
            return permitted(std::array<Permit, 2>{{{OsCm, Oss}, {CmMa, Mano}}}, iface, sender);
          },
          [&](const Ec4Report&) { return permitted(only(CmZm, Cccm), iface, sender); },
          [&](const StateNotice&) {
            return permitted(
                std::array<Permit, 4>{{{CmZm, Zm}, {EsZm, Zm}, {ZmLa, Zm}, {ZmSa, Zm}}}, iface,
                sender);
          },
          [&](const DiagnosisNotice&) { return permitted(only(CmMa, Cccm), iface, sender); },
          [&](const DisasterAlarm&) {
            return permitted(std::array<Permit, 2>{{{IoEs, Iot}, {EsCm, Es}}}, iface, sender);
          },
          [&](const ProfileSnapshot&) { return permitted(only(LaLs, Lss), iface, sender); },
          [&](const OperationReport& r) {
            if (r.actor == AuditActor::Zm) return permitted(only(ZmSa, Zm), iface, sender);
            return permitted(only(LaSa, Laa), iface, sender);
          },
          [&](const CentralAuthRequest&) { return permitted(only(MeZm, Zm), iface, sender); },
          [&](const CentralAuthAnswer&) { return permitted(only(MeZm, Amf), iface, sender); },
          [&](const KeyRequest&) {
            return permitted(std::array<Permit, 2>{{{MeZm, Zm}, {ZmLa, Zm}}}, iface, sender);
          },
          [&](const KeyToken& k) {
            if (k.origin == KeyOrigin::Amf) return permitted(only(MeZm, Amf), iface, sender);
            return permitted(only(ZmLa, Laa), iface, sender);
          },
          [&](const LocalAuthRequest&) { return permitted(only(ZmLa, Zm), iface, sender); },
          [&](const LocalAuthResult&) { return permitted(only(ZmLa, Laa), iface, sender); },
          [&](const AttachRequest&) { return permitted(only(ZmUe, Ue), iface, sender); },
          [&](const DetachNotice&) { return permitted(only(ZmUe, Ue), iface, sender); },
          [&](const AccessRequest&) { return permitted(only(ZmUe, Ue), iface, sender); },
          [&](const AccessResponse&) { return permitted(only(ZmUe, Zm), iface, sender); },
          [&](const SecurityModeCommand&) { return permitted(only(ZmUe, Zm), iface, sender); },
          [&](const ForcedDetach&) { return permitted(only(ZmUe, Zm), iface, sender); },
      },
      p);
}

FunctionClass function_class(const Payload& p) noexcept {
  if (std::holds_alternative<CentralAuthRequest>(p) || std::holds_alternative<CentralAuthAnswer>(p))
    return FunctionClass::Authentication;
  if (std::holds_alternative<KeyRequest>(p) || std::holds_alternative<KeyToken>(p))
    return FunctionClass::Authorization;
  if (std::holds_alternative<ProfileSnapshot>(p)) return FunctionClass::SubscriberSync;
  return FunctionClass::Other;
}

namespace {

Json reading_json(const ProbeReading& r) {
  Json j;
  j["reachable"] = r.reachable;
  j["latency_ms"] = r.latency_ms;
  j["loss_rate"] = r.loss_rate;
  j["throughput"] = r.throughput;
  return j;
}

}  // namespace

Json payload_to_json(const Payload& p) {
  Json j = Json::object();
  std::visit(
      overloaded{
          [&](const ProbeRequest& m) { j["poll"] = m.poll; },
          [&](const ProbeReply& m) {
            j["poll"] = m.poll;
            j["reading"] = reading_json(m.reading);
          },
          [&](const Ec4Report& m) { j["ec4"] = std::string(to_string(m.ec4)); },
          [&](const StateNotice& m) { j["state"] = std::string(to_string(m.state)); },
          [&](const DiagnosisNotice& m) {
            j["hypothesis"] = std::string(to_string(m.diagnosis.hypothesis));
            j["evidence"] = m.diagnosis.evidence;
            j["at"] = m.diagnosis.at;
          },
          [&](const DisasterAlarm& m) {
            j["event_id"] = m.event.event_id;
            j["disaster"] = std::string(to_string(m.event.kind));
            j["at"] = m.event.at;
            j["ttl"] = m.event.ttl;
          },
          [&](const ProfileSnapshot& m) {
            Json ids = Json::array();
            for (const auto& prof : m.profiles) {
              Json e;
              e["id"] = prof.subscriber_id;
              e["sync_version"] = prof.sync_version;
              ids.push_back(std::move(e));
            }
            j["profiles"] = std::move(ids);
          },
          [&](const OperationReport& m) {
            j["actor"] = std::string(to_string(m.actor));
            j["kind"] = std::string(to_string(m.kind));
            j["ue"] = m.ue_id;
            j["outcome"] = m.outcome;
          },
          [&](const CentralAuthRequest& m) {
            j["ue"] = m.ue_id;
            j["request_id"] = m.request_id;
          },
          [&](const CentralAuthAnswer& m) {
            j["ue"] = m.ue_id;
            j["request_id"] = m.request_id;
            j["accepted"] = m.accepted;
          },
          [&](const KeyRequest& m) { j["ue"] = m.ue_id; },
          [&](const KeyToken& m) {
            j["ue"] = m.ue_id;
            j["origin"] = m.origin == KeyOrigin::Amf ? "AMF" : "LAA";
            j["scope"] = "AS";
            j["counter"] = m.counter;
            j["token"] = to_hex(m.token);
          },
          [&](const LocalAuthRequest& m) { j["ue"] = m.ue_id; },
          [&](const LocalAuthResult& m) {
            j["ue"] = m.ue_id;
            j["trust"] = to_string(m.trust);
          },
          [&](const AttachRequest& m) { j["ue"] = m.ue_id; },
          [&](const DetachNotice& m) { j["ue"] = m.ue_id; },
          [&](const AccessRequest& m) {
            j["ue"] = m.ue_id;
            j["service"] = m.service;
          },
          [&](const AccessResponse& m) {
            j["ue"] = m.ue_id;
            j["service"] = m.service;
            j["verdict"] = std::string(to_string(m.verdict));
            j["route"] = std::string(to_string(m.route));
            j["reason"] = m.reason;
          },
          [&](const SecurityModeCommand& m) {
            j["ue"] = m.ue_id;
            j["origin"] = m.origin == KeyOrigin::Amf ? "AMF" : "LAA";
            j["counter"] = m.counter;
          },
          [&](const ForcedDetach& m) { j["ue"] = m.ue_id; },
      },
      p);
  return j;
}

// ---------------------------------------------------------------------------

Interconnect::Interconnect(BusConfig config, Scheduler& scheduler, TraceSink& trace,
                           std::uint64_t seed)
    : config_(config), scheduler_(scheduler), trace_(trace), rng_(seed) {
  hints_ = tz::priority_hints(TzState::C);
}

void Interconnect::attach(Entity entity, Handler handler) {
  handlers_.insert_or_assign(entity, std::move(handler));
}

void Interconnect::check_route(const Envelope& env) const {
  if (!receiver_of(env.iface, env.sender)) {
    throw Error(ErrorCode::IllegalRoute, std::string(to_string(env.sender)) + " cannot send on " +
                                             std::string(to_string(env.iface)));
  }
  if (!payload_allowed(env.payload, env.iface, env.sender)) {
    throw Error(ErrorCode::IllegalRoute, std::string(payload_kind(env.payload)) + " from " +
                                             std::string(to_string(env.sender)) + " on " +
                                             std::string(to_string(env.iface)));
  }
}

double Interconnect::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

Interconnect::Fate Interconnect::central_fate(FunctionClass fc) {
  switch (link_class_) {
    case Ec4Class::Lost:
      return {true, "link_lost", 0};
    case Ec4Class::Weak: {
      const bool high = priority_of(hints_, fc) == Priority::High;
      const double p = high ? config_.weak_drop_high : config_.weak_drop;
      if (uniform() < p) return {true, "weak_loss", 0};
      return {false, {}, config_.central_latency * config_.weak_latency_factor};
    }
    case Ec4Class::Healthy:
      break;
  }
  return {false, {}, config_.central_latency};
}

SimTime Interconnect::fifo_time(InterfaceName iface, Entity sender, SimTime t) {
  auto& last = last_delivery_[{iface, sender}];
  if (t < last) t = last;
  last = t;
  return t;
}

Json Interconnect::envelope_json(const Envelope& env, Entity receiver) const {
  Json j;
  j["interface"] = std::string(to_string(env.iface));
  j["sender"] = std::string(to_string(env.sender));
  j["receiver"] = std::string(to_string(receiver));
  j["kind"] = std::string(payload_kind(env.payload));
  j["sent_at"] = env.sent_at;
  j["payload"] = payload_to_json(env.payload);
  return j;
}

bool Interconnect::send(Envelope env) {
  check_route(env);
  const Entity receiver = *receiver_of(env.iface, env.sender);
  auto handler = handlers_.find(receiver);
  if (handler == handlers_.end()) {
    throw Error(ErrorCode::IllegalRoute,
                "no endpoint registered for " + std::string(to_string(receiver)));
  }
  env.sent_at = scheduler_.now();
  auto& ctr = counters_[static_cast<std::size_t>(env.iface)];
  ++ctr.sent;

  const bool crossing = crosses_ec4(env.iface);
  SimTime latency = config_.intra_edge_latency;
  if (crossing) {
    Fate fate = central_fate(function_class(env.payload));
    if (fate.dropped) {
      Json body = envelope_json(env, receiver);
      body["reason"] = fate.reason;
      trace_.emit(env.sent_at, TraceCategory::Drop, std::move(body));
      ++ctr.dropped;
      return false;
    }
    latency = fate.latency;
  }
  const SimTime at = fifo_time(env.iface, env.sender, env.sent_at + latency);
  scheduler_.schedule(at, [this, env = std::move(env), receiver, crossing]() {
    auto& c = counters_[static_cast<std::size_t>(env.iface)];
    if (crossing && link_class_ == Ec4Class::Lost) {
      Json body = envelope_json(env, receiver);
      body["reason"] = "link_lost_in_flight";
      trace_.emit(scheduler_.now(), TraceCategory::Drop, std::move(body));
      ++c.dropped;
      return;
    }
    trace_.emit(scheduler_.now(), TraceCategory::Envelope, envelope_json(env, receiver));
    ++c.delivered;
    handlers_.at(receiver)(env);
  });
  return true;
}

void Interconnect::record_local(const Envelope& env) {
  check_route(env);
  const Entity receiver = *receiver_of(env.iface, env.sender);
  auto& ctr = counters_[static_cast<std::size_t>(env.iface)];
  ++ctr.sent;
  ++ctr.delivered;
  Envelope copy = env;
  copy.sent_at = scheduler_.now();
  trace_.emit(copy.sent_at, TraceCategory::Envelope, envelope_json(copy, receiver));
}

void Interconnect::attach_audit_center(BatchHandler on_batch) { on_batch_ = std::move(on_batch); }
void Interconnect::attach_audit_auditor(AckHandler on_ack) { on_ack_ = std::move(on_ack); }

namespace {

Json audit_transport_json(std::string_view sender, std::string_view receiver,
                          std::string_view kind, SimTime sent_at, Json payload) {
  Json j;
  j["interface"] = "audit-transport";
  j["sender"] = std::string(sender);
  j["receiver"] = std::string(receiver);
  j["kind"] = std::string(kind);
  j["sent_at"] = sent_at;
  j["payload"] = std::move(payload);
  return j;
}

}  // namespace

bool Interconnect::send_audit_batch(const AuditBatch& batch, SimTime now) {
  if (!on_batch_) throw Error(ErrorCode::IllegalRoute, "no auditing center registered");
  Json payload;
  payload["epoch"] = batch.epoch;
  payload["seqs"] = Json::array();
  for (const auto& r : batch.records) payload["seqs"].push_back(r.seq);
  Json body = audit_transport_json("SA", "AUDIT_CENTER", "AuditBatch", now, payload);

  Fate fate = central_fate(FunctionClass::Other);
  if (fate.dropped) {
    body["reason"] = fate.reason;
    trace_.emit(now, TraceCategory::Drop, std::move(body));
    return false;
  }
  SimTime at = std::max(now + fate.latency, last_audit_delivery_[0]);
  last_audit_delivery_[0] = at;
  scheduler_.schedule(at, [this, batch, body = std::move(body)]() mutable {
    if (link_class_ == Ec4Class::Lost) {
      body["reason"] = "link_lost_in_flight";
      trace_.emit(scheduler_.now(), TraceCategory::Drop, std::move(body));
      return;
    }
    trace_.emit(scheduler_.now(), TraceCategory::Envelope, body);
    on_batch_(batch, scheduler_.now());
  });
  return true;
}

bool Interconnect::send_audit_ack(const AuditAck& ack, SimTime now) {
  if (!on_ack_) throw Error(ErrorCode::IllegalRoute, "no auditor registered for acks");
  Json payload;
  payload["epoch"] = ack.epoch;
  payload["up_to"] = ack.up_to;
  Json body = audit_transport_json("AUDIT_CENTER", "SA", "AuditAck", now, payload);

  const std::uint64_t ordinal = ++acks_sent_;
  Fate fate = central_fate(FunctionClass::Other);
  if (ack_drops_.contains(ordinal)) fate = {true, "injected_ack_loss", 0};
  if (fate.dropped) {
    body["reason"] = fate.reason;
    trace_.emit(now, TraceCategory::Drop, std::move(body));
    return false;
  }
  SimTime at = std::max(now + fate.latency, last_audit_delivery_[1]);
  last_audit_delivery_[1] = at;
  scheduler_.schedule(at, [this, ack, body = std::move(body)]() mutable {
    if (link_class_ == Ec4Class::Lost) {
      body["reason"] = "link_lost_in_flight";
      trace_.emit(scheduler_.now(), TraceCategory::Drop, std::move(body));
      return;
    }
    trace_.emit(scheduler_.now(), TraceCategory::Envelope, body);
    on_ack_(ack, scheduler_.now());
  });
  return true;
}

void Interconnect::set_link(const ProbeReading& reading, SimTime now) {
  link_ = reading;
  link_class_ = classify_reading(reading, config_.thresholds);
  Json body;
  body["kind"] = "link";
  body["reading"] = reading_json(reading);
  body["class"] = std::string(to_string(link_class_));
  trace_.emit(now, TraceCategory::Metric, std::move(body));
}

void Interconnect::set_priority_hints(std::vector<PriorityHint> hints, SimTime now) {
  if (hints == hints_) return;
  hints_ = std::move(hints);
  Json body;
  body["kind"] = "priority_hints";
  Json h = Json::object();
  for (const auto& hint : hints_) {
    h[std::string(to_string(hint.function_class))] = std::string(to_string(hint.priority));
  }
  body["hints"] = std::move(h);
  trace_.emit(now, TraceCategory::Metric, std::move(body));
}

const InterfaceCounters& Interconnect::counters(InterfaceName iface) const {
  return counters_[static_cast<std::size_t>(iface)];
}

}  // namespace tz

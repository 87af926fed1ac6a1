#pragma once

// Typed message bus over the twelve Trust Zone interfaces.
//
// Every envelope is checked against the interface adjacency and the payload
// legality table before it is accepted. Interfaces whose far end sits in the
// central cloud (Cm-Ma, Os-Cm, Me-Zm, La-Ls) and the audit transport share
// the fate of the edge-to-central link: nothing crosses while it is Lost,
// and in Weak they see extra latency and random loss.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tz/access.hpp"
#include "tz/audit.hpp"
#include "tz/cccm.hpp"
#include "tz/emergency.hpp"
#include "tz/local_access.hpp"
#include "tz/scheduler.hpp"
#include "tz/state_machine.hpp"
#include "tz/trace.hpp"

namespace tz {

enum class Entity : std::uint8_t { Cccm, Zm, Laa, Lss, Sa, Es, Iot, Oss, Mano, Amf, Ue };

enum class InterfaceName : std::uint8_t {
  CmMa, CmZm, EsCm, EsZm, IoEs, LaLs, LaSa, MeZm, OsCm, ZmLa, ZmSa, ZmUe,
};

inline constexpr std::array<InterfaceName, 12> kAllInterfaces{
    InterfaceName::CmMa, InterfaceName::CmZm, InterfaceName::EsCm, InterfaceName::EsZm,
    InterfaceName::IoEs, InterfaceName::LaLs, InterfaceName::LaSa, InterfaceName::MeZm,
    InterfaceName::OsCm, InterfaceName::ZmLa, InterfaceName::ZmSa, InterfaceName::ZmUe};

std::string_view to_string(Entity e) noexcept;
std::string_view to_string(InterfaceName i) noexcept;
std::optional<InterfaceName> parse_interface(std::string_view text) noexcept;
std::optional<Entity> parse_entity(std::string_view text) noexcept;

struct Edge {
  Entity sender;
  Entity receiver;
  InterfaceName iface;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed sender/receiver adjacency implied by the interface list.
const std::set<Edge>& connectivity_matrix();

std::optional<Entity> receiver_of(InterfaceName iface, Entity sender) noexcept;

// True for interfaces whose far end is in the central cloud.
bool crosses_ec4(InterfaceName iface) noexcept;

// --- payloads --------------------------------------------------------------

enum class KeyOrigin : std::uint8_t { Amf, Laa };

struct ProbeRequest { std::uint64_t poll = 0; };
struct ProbeReply { std::uint64_t poll = 0; ProbeReading reading; };
struct Ec4Report { Ec4Class ec4 = Ec4Class::Healthy; };
struct StateNotice { TzState state = TzState::C; };
struct DiagnosisNotice { Diagnosis diagnosis; };
struct DisasterAlarm { DisasterEvent event; };
struct ProfileSnapshot { std::vector<SubscriberProfile> profiles; };
struct OperationReport { AuditActor actor = AuditActor::Zm; AuditKind kind = AuditKind::AccessDecision; UeId ue_id; std::string outcome; };
struct CentralAuthRequest { UeId ue_id; std::uint64_t request_id = 0; std::string credential; };
struct CentralAuthAnswer { UeId ue_id; std::uint64_t request_id = 0; bool accepted = false; };
struct KeyRequest { UeId ue_id; };
struct KeyToken { UeId ue_id; KeyOrigin origin = KeyOrigin::Laa; std::uint64_t counter = 0; Bytes token; };
struct LocalAuthRequest { UeId ue_id; };
struct LocalAuthResult { UeId ue_id; Trust trust = Trust::Untrusted; };
struct AttachRequest { UeId ue_id; std::string credential; };
struct DetachNotice { UeId ue_id; };
struct AccessRequest { UeId ue_id; std::string service; };
struct AccessResponse { UeId ue_id; std::string service; Verdict verdict = Verdict::Deny; Route route = Route::None; std::string reason; };
struct SecurityModeCommand { UeId ue_id; KeyOrigin origin = KeyOrigin::Laa; std::uint64_t counter = 0; };
struct ForcedDetach { UeId ue_id; };

using Payload = std::variant<ProbeRequest, ProbeReply, Ec4Report, StateNotice, DiagnosisNotice,
                             DisasterAlarm, ProfileSnapshot, OperationReport, CentralAuthRequest,
                             CentralAuthAnswer, KeyRequest, KeyToken, LocalAuthRequest,
                             LocalAuthResult, AttachRequest, DetachNotice, AccessRequest,
                             AccessResponse, SecurityModeCommand, ForcedDetach>;

std::string_view payload_kind(const Payload& p) noexcept;

/// Whether `p` may be sent by `sender` on `iface`.
bool payload_allowed(const Payload& p, InterfaceName iface, Entity sender) noexcept;

FunctionClass function_class(const Payload& p) noexcept;

Json payload_to_json(const Payload& p);

struct Envelope {
  InterfaceName iface = InterfaceName::CmZm;
  Entity sender = Entity::Cccm;
  Payload payload;
  SimTime sent_at = 0;
};

// ---------------------------------------------------------------------------

struct BusConfig {
  SimTime intra_edge_latency = 0;
  SimTime central_latency = 10;
  SimTime weak_latency_factor = 10;
  double weak_drop = 0.2;
  double weak_drop_high = 0.05;
  Ec4Thresholds thresholds;
};

struct InterfaceCounters {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
};

class Interconnect {
 public:
  using Handler = std::function<void(const Envelope&)>;
  using BatchHandler = std::function<void(const AuditBatch&, SimTime)>;
  using AckHandler = std::function<void(const AuditAck&, SimTime)>;

  Interconnect(BusConfig config, Scheduler& scheduler, TraceSink& trace, std::uint64_t seed);

  void attach(Entity entity, Handler handler);

  /// Queues an envelope for delivery. Throws Error{IllegalRoute} on a
  /// payload, interface or direction mismatch, or when the receiver has no
  /// handler. Returns false when the envelope was dropped at send time.
  bool send(Envelope env);

  /// In-process delivery between the co-located local V-AAA entities (ZM,
  /// LAA, SA). Same route checks as send(); the caller performs the call.
  void record_local(const Envelope& env);

  void attach_audit_center(BatchHandler on_batch);
  void attach_audit_auditor(AckHandler on_ack);
  bool send_audit_batch(const AuditBatch& batch, SimTime now);
  bool send_audit_ack(const AuditAck& ack, SimTime now);

  // Acknowledgments with these 1-based ordinals are lost (fault injection).
  void set_audit_ack_drops(std::set<std::uint64_t> ordinals) { ack_drops_ = std::move(ordinals); }

  void set_link(const ProbeReading& reading, SimTime now);
  const ProbeReading& link() const noexcept { return link_; }
  Ec4Class link_class() const noexcept { return link_class_; }

  void set_priority_hints(std::vector<PriorityHint> hints, SimTime now);
  const std::vector<PriorityHint>& priority_hints() const noexcept { return hints_; }

  const InterfaceCounters& counters(InterfaceName iface) const;

 private:
  struct Fate {
    bool dropped = false;
    std::string reason;
    SimTime latency = 0;
  };

  void check_route(const Envelope& env) const;
  Fate central_fate(FunctionClass fc);
  double uniform();
  Json envelope_json(const Envelope& env, Entity receiver) const;
  SimTime fifo_time(InterfaceName iface, Entity sender, SimTime t);

  BusConfig config_;
  Scheduler& scheduler_;
  TraceSink& trace_;
  std::mt19937_64 rng_;
  std::map<Entity, Handler> handlers_;
  BatchHandler on_batch_;
  AckHandler on_ack_;
  std::set<std::uint64_t> ack_drops_;
  std::uint64_t acks_sent_ = 0;
  ProbeReading link_;
  Ec4Class link_class_ = Ec4Class::Healthy;
  std::vector<PriorityHint> hints_;
  std::map<std::pair<InterfaceName, Entity>, SimTime> last_delivery_;
  SimTime last_audit_delivery_[2] = {0, 0};
  std::array<InterfaceCounters, 12> counters_{};
};

}  // namespace tz

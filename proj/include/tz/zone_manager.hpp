#pragma once

// Zone manager: drives the TZ state from link reports, switches the local
// V-AAA (LAA + SA) on and off, routes access requests to the central or the
// local AAA path and runs the quarantine flush when the link comes back.
//
// ZM, LAA and SA are co-located, so calls between them are direct and only
// logged on the bus via Interconnect::record_local. Everything toward the
// UE, the ES, the CCCM and the AMF goes through Interconnect::send.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tz/access.hpp"
#include "tz/audit.hpp"
#include "tz/emergency.hpp"
#include "tz/interconnect.hpp"
#include "tz/local_access.hpp"
#include "tz/scheduler.hpp"
#include "tz/state_machine.hpp"
#include "tz/trace.hpp"

namespace tz {

struct ZoneConfig {
  SimTime transient_dwell = 100;
  SimTime reauth_stagger = 200;
  SimTime central_auth_timeout = 1000;
  // Regular (non-emergency) services a fully admitted device receives.
  std::set<std::string> full_services{"Data", "Voice"};
  // Debug fault: emergency-only grants also hand out the full service set.
  bool inject_untrusted_grant = false;
};

class ZoneManager {
 public:
  using StateListener = std::function<void(const TransitionRecord&)>;
  using RecordListener = std::function<void(const AuditRecord&)>;

  ZoneManager(ZoneConfig config, Scheduler& scheduler, Interconnect& bus, TraceSink& trace,
              LocalAccess& laa, SecurityAuditor& sa, EmergencyServices& es);

  ZoneManager(const ZoneManager&) = delete;
  ZoneManager& operator=(const ZoneManager&) = delete;

  // Bus handler for everything addressed to the ZM.
  void on_envelope(const Envelope& env);

  void set_state_listener(StateListener l) { state_listener_ = std::move(l); }
  void set_record_listener(RecordListener l) { record_listener_ = std::move(l); }

  /// Applies a classified link report. Reports in a transient state and
  /// reports that keep the state are no-ops.
  std::optional<TransitionRecord> on_ec4_report(Ec4Class report, SimTime now);

  /// Decides a request when that is possible right away. Returns nothing
  /// while a central answer is outstanding or while the request is parked
  /// until the zone settles in L. Throws Error{UnknownUe} for a device that
  /// is not attached.
  std::optional<AccessDecision> handle_access_request(const UeId& ue_id,
                                                      const std::string& service);

  /// Keeps trust for every completed authentication and demotes devices
  /// whose central authentication is still running. Returns the trusted set.
  std::set<UeId> on_disconnect(SimTime now);

  /// Builds and arms the quarantine schedule for `trusted`.
  ReauthSchedule on_reconnect(SimTime now, const std::set<UeId>& trusted);

  /// Runs the AS security procedure for a trusted device. The local path
  /// returns the LAA token at once; the central path returns nothing and
  /// completes when the AMF answers. Throws Error{NotTrusted} or
  /// Error{LaaInactive}.
  std::optional<AsKeyToken> as_security_procedure(const UeId& ue_id);

  // Hook handed to the LAA so that its operations are traced and audited.
  void report_laa_operation(AuditKind kind, const UeId& ue_id, std::string_view outcome);

  TzState state() const noexcept { return driver_.state(); }
  const DeviceTable& devices() const noexcept { return devices_; }
  const ReauthSchedule& schedule() const noexcept { return schedule_; }
  const std::vector<TransitionRecord>& transitions() const noexcept { return transitions_; }
  std::size_t pending_central_auths() const noexcept { return pending_.size(); }
  std::size_t deferred_requests() const noexcept { return deferred_.size(); }

 private:
  struct PendingAuth {
    UeId ue_id;
    std::string service;
  };

  void apply_transition(const TransitionRecord& rec);
  void notify_state(TzState s);
  void resolve_due();
  void execute_reauth(std::uint64_t generation, std::size_t index);

  void on_attach(const AttachRequest& m);
  void on_detach(const DetachNotice& m);
  void on_central_answer(const CentralAuthAnswer& m);
  void on_amf_key(const KeyToken& m);
  void on_central_timeout(std::uint64_t request_id);

  AccessDecision decide_local(DeviceRecord& dev, const std::string& service);
  AccessDecision fallback(DeviceRecord& dev, const std::string& service, std::string reason);
  AccessDecision grant_full(DeviceRecord& dev, const std::string& service, std::string reason);
  AccessDecision grant_emergency(DeviceRecord& dev, const std::string& service,
                                 std::string reason);
  AccessDecision deny(DeviceRecord& dev, const std::string& service, std::string reason);
  AccessDecision finish(DeviceRecord& dev, AccessDecision d);

  std::set<std::string> full_grant_set() const;
  std::set<std::string> emergency_grant_set() const;

  void set_trust(DeviceRecord& dev, Trust trust, AuthOrigin origin, std::string outcome);
  void report_op(AuditActor actor, AuditKind kind, const UeId& ue_id, std::string outcome,
                 Json detail = Json::object());

  ZoneConfig config_;
  Scheduler& sched_;
  Interconnect& bus_;
  TraceSink& trace_;
  LocalAccess& laa_;
  SecurityAuditor& sa_;
  EmergencyServices& es_;

  TransitionDriver driver_;
  std::vector<TransitionRecord> transitions_;
  DeviceTable devices_;
  std::map<UeId, std::string> credentials_;
  std::map<std::uint64_t, PendingAuth> pending_;
  std::vector<PendingAuth> deferred_;
  std::uint64_t next_request_id_ = 1;
  ReauthSchedule schedule_;
  std::uint64_t schedule_generation_ = 0;
  StateListener state_listener_;
  RecordListener record_listener_;
};

}  // namespace tz

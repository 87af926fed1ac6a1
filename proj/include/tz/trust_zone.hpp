#pragma once

// Edge-side assembly of one Trust Zone: the five security entities wired to
// the interconnect. ZM, LAA and SA form the local V-AAA and call each other
// directly; CCCM and ES are separate actors on the bus.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tz/audit.hpp"
#include "tz/cccm.hpp"
#include "tz/emergency.hpp"
#include "tz/interconnect.hpp"
#include "tz/local_access.hpp"
#include "tz/scheduler.hpp"
#include "tz/trace.hpp"
#include "tz/zone_manager.hpp"

namespace tz {

struct CccmConfig {
  SimTime poll_period = 1000;
  SimTime probe_timeout = 500;
  Ec4Thresholds thresholds;
};

/// Polls OSS and NFV-MANO, classifies the link, reports every full window
/// to the ZM, diagnoses degraded states and publishes priority hints.
class CccmAgent {
 public:
  CccmAgent(CccmConfig config, Scheduler& scheduler, Interconnect& bus, TraceSink& trace);

  void start(SimTime first_poll = 0);
  void on_envelope(const Envelope& env);

  const ConnectionMonitor& monitor() const noexcept { return monitor_; }
  TzState known_state() const noexcept { return state_; }
  const std::vector<Diagnosis>& diagnoses() const noexcept { return diagnoses_; }
  std::vector<DisasterEvent> active_disasters(SimTime now) const;

 private:
  struct Poll {
    SimTime at = 0;
    std::optional<ProbeReading> oss;
    std::optional<ProbeReading> mano;
  };

  void poll();
  void collect(std::uint64_t poll_no);
  void maybe_diagnose(bool force);

  CccmConfig config_;
  Scheduler& sched_;
  Interconnect& bus_;
  TraceSink& trace_;
  ConnectionMonitor monitor_;
  TzState state_ = TzState::C;
  std::uint64_t next_poll_ = 0;
  std::map<std::uint64_t, Poll> polls_;
  std::map<std::string, DisasterEvent> disasters_;
  std::optional<Hypothesis> last_hypothesis_;
  std::vector<Diagnosis> diagnoses_;
};

/// ES actor: disaster intake from IoT, forwarding to CCCM, expiry.
class EsAgent {
 public:
  EsAgent(Scheduler& scheduler, Interconnect& bus, TraceSink& trace, EmergencyServices& es);

  void on_envelope(const Envelope& env);

  std::size_t forwarded() const noexcept { return forwarded_; }

 private:
  Scheduler& sched_;
  Interconnect& bus_;
  TraceSink& trace_;
  EmergencyServices& es_;
  std::size_t forwarded_ = 0;
};

/// Ships SA records to the central auditing center over the audit
/// transport, retrying until every record of the epoch is acknowledged.
class AuditShipper {
 public:
  AuditShipper(Scheduler& scheduler, Interconnect& bus, TraceSink& trace, SecurityAuditor& sa,
               SimTime retry_interval);

  void on_state(TzState s);
  void on_record();
  void on_ack(const AuditAck& ack, SimTime now);

  std::size_t batches_sent() const noexcept { return batches_; }

 private:
  bool may_push() const;
  void push();
  void arm_retry();

  Scheduler& sched_;
  Interconnect& bus_;
  TraceSink& trace_;
  SecurityAuditor& sa_;
  SimTime retry_;
  bool retry_armed_ = false;
  std::size_t batches_ = 0;
};

struct TrustZoneConfig {
  CccmConfig cccm;
  ZoneConfig zone;
  RestrictedPolicy restricted;
  SimTime audit_retry = 50;
};

class TrustZone {
 public:
  TrustZone(TrustZoneConfig config, Scheduler& scheduler, Interconnect& bus, TraceSink& trace,
            std::vector<SubscriberProfile> lss_profiles);

  TrustZone(const TrustZone&) = delete;
  TrustZone& operator=(const TrustZone&) = delete;

  void start();

  ZoneManager& zm() noexcept { return *zm_; }
  const ZoneManager& zm() const noexcept { return *zm_; }
  LocalAccess& laa() noexcept { return laa_; }
  const LocalAccess& laa() const noexcept { return laa_; }
  SecurityAuditor& sa() noexcept { return sa_; }
  const SecurityAuditor& sa() const noexcept { return sa_; }
  EmergencyServices& es() noexcept { return es_; }
  const EmergencyServices& es() const noexcept { return es_; }
  CccmAgent& cccm() noexcept { return cccm_; }
  const CccmAgent& cccm() const noexcept { return cccm_; }

 private:
  void on_laa_envelope(const Envelope& env);

  Scheduler& sched_;
  Interconnect& bus_;
  TraceSink& trace_;
  SecurityAuditor sa_;
  EmergencyServices es_;
  LocalAccess laa_;
  std::unique_ptr<ZoneManager> zm_;
  CccmAgent cccm_;
  EsAgent es_agent_;
  AuditShipper shipper_;
};

}  // namespace tz

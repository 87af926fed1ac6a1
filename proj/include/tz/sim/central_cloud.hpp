#pragma once

// Central cloud stand-ins: OSS and NFV-MANO probe targets, the AMF with the
// central V-AAA oracle over the hierarchical subscriber database, the
// central side of the LSS synchronization feed and the auditing center.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tz/audit.hpp"
#include "tz/interconnect.hpp"
#include "tz/local_access.hpp"
#include "tz/scheduler.hpp"
#include "tz/sim/scenario.hpp"
#include "tz/trace.hpp"

namespace tz::sim {

enum class OracleAnswer { Accept, Reject };

class CentralCloud {
 public:
  CentralCloud(Scheduler& scheduler, Interconnect& bus, TraceSink& trace, const Scenario& scenario);

  CentralCloud(const CentralCloud&) = delete;
  CentralCloud& operator=(const CentralCloud&) = delete;

  void start();

  /// Accept iff the hierarchical database holds `ue_id` with a matching
  /// credential digest. Throws Error{Unreachable} when `link` is Lost.
  OracleAnswer central_vaaa_oracle(const UeId& ue_id, const std::string& credential,
                                   Ec4Class link) const;

  void apply_update(const CentralProfileUpdate& update);

  // Profiles of the regional LSS subset, as shipped on La-Ls.
  std::vector<SubscriberProfile> lss_snapshot() const;

  const std::map<std::string, SubscriberProfile>& database() const noexcept { return db_; }
  const AuditCenter& audit_center() const noexcept { return center_; }
  const std::vector<Diagnosis>& received_diagnoses() const noexcept { return diagnoses_; }

 private:
  void on_envelope(Entity self, const Envelope& env);
  void on_batch(const AuditBatch& batch, SimTime now);
  void sync_tick();

  Scheduler& sched_;
  Interconnect& bus_;
  TraceSink& trace_;
  SimTime sync_period_;
  std::map<std::string, SubscriberProfile> db_;
  std::set<std::string> lss_;
  std::map<UeId, std::uint64_t> amf_counters_;
  AuditCenter center_;
  std::vector<Diagnosis> diagnoses_;
};

SubscriberProfile make_profile(const SubscriberEntry& e);

}  // namespace tz::sim

#include "tz/sim/simulation.hpp"

#include <stdexcept>

#include "tz/overloaded.hpp"

namespace tz::sim {

namespace {

TrustZoneConfig zone_config(const SimConfig& c) {
  TrustZoneConfig z;
  z.cccm.poll_period = c.poll_period;
  z.cccm.probe_timeout = c.probe_timeout;
  z.cccm.thresholds = c.thresholds;
  z.zone.transient_dwell = c.transient_dwell;
  z.zone.reauth_stagger = c.reauth_stagger;
  z.zone.central_auth_timeout = c.central_auth_timeout;
  z.zone.inject_untrusted_grant = c.inject_violation == "untrusted_grant";
  z.restricted = c.restricted;
  z.audit_retry = c.audit_retry;
  return z;
}

std::vector<SubscriberProfile> initial_lss(const Scenario& sc) {
  std::vector<SubscriberProfile> out;
  for (const auto& id : sc.lss) {
    for (const auto& s : sc.subscribers) {
      if (s.id == id) out.push_back(make_profile(s));
    }
  }
  return out;
}

}  // namespace

Simulation::Simulation(const Scenario& scenario, RunOptions options)
    : scenario_(scenario),
      options_(options),
      seed_(options.seed.value_or(scenario.config.seed)),
      bus_(bus_config(scenario.config), kernel_, trace_, seed_) {
  if (options_.until < 0) throw std::invalid_argument("until must be non-negative");
  bus_.set_audit_ack_drops(scenario.config.drop_audit_acks);
  zone_ = std::make_unique<TrustZone>(zone_config(scenario.config), kernel_, bus_, trace_,
                                      initial_lss(scenario));
  cloud_ = std::make_unique<CentralCloud>(kernel_, bus_, trace_, scenario);
  ues_ = std::make_unique<UePopulation>(kernel_, bus_);
  if (options_.check_invariants) {
    checker_ = std::make_unique<InvariantChecker>(*zone_, bus_, scenario.config.transient_dwell);
  }
}

void Simulation::schedule_inputs() {
  for (const auto& ev : scenario_.events) {
    const EventKind* kind = &ev.kind;
    kernel_.schedule_input(ev.at, [this, kind] {
      std::visit(overloaded{
                     [&](const LinkQuality& m) { bus_.set_link(m.reading, kernel_.now()); },
                     [&](const DisasterInput& m) {
                       bus_.send({InterfaceName::IoEs, Entity::Iot, DisasterAlarm{m.event},
                                  kernel_.now()});
                     },
                     [&](const UeAttach& m) { ues_->attach(m.ue_id, m.credential); },
                     [&](const UeDetach& m) { ues_->detach(m.ue_id); },
                     [&](const UeAccessRequest& m) { ues_->request(m.ue_id, m.service); },
                     [&](const CentralProfileUpdate& m) {
                       cloud_->apply_update(m);
                       Json body;
                       body["kind"] = "profile_update";
                       body["id"] = m.profile.id;
                       body["sync_version"] = m.profile.sync_version;
                       body["in_lss"] = m.in_lss;
                       trace_.emit(kernel_.now(), TraceCategory::Metric, std::move(body));
                     },
                 },
                 *kind);
    });
  }
}

Json Simulation::end_snapshot() const {
  Json devices = Json::array();
  for (const auto& [id, d] : zone_->zm().devices()) {
    Json j;
    j["ue"] = id;
    j["attached"] = d.attached;
    j["trust"] = to_string(d.trust);
    j["origin"] = std::string(to_string(d.auth_origin));
    Json g = Json::array();
    for (const auto& s : d.granted) g.push_back(s);
    j["granted"] = std::move(g);
    devices.push_back(std::move(j));
  }
  Json body;
  body["kind"] = "run_end";
  body["state"] = std::string(to_string(zone_->zm().state()));
  body["devices"] = std::move(devices);
  body["audit_center"] = {{"records", cloud_->audit_center().records().size()},
                          {"duplicates", cloud_->audit_center().duplicates()}};
  return body;
}

RunResult Simulation::run() {
  if (ran_) throw std::logic_error("a simulation runs once");
  ran_ = true;

  Json init;
  init["kind"] = "init";
  init["seed"] = seed_;
  init["until"] = options_.until;
  init["state"] = std::string(to_string(zone_->zm().state()));
  Json names = Json::array();
  for (const auto& s : zone_->es().catalog()) names.push_back(s.name);
  init["emergency_services"] = std::move(names);
  init["subscribers"] = scenario_.subscribers.size();
  init["lss"] = scenario_.lss.size();
  init["events"] = scenario_.events.size();
  trace_.emit(0, TraceCategory::Metric, std::move(init));

  schedule_inputs();
  zone_->start();
  cloud_->start();

  std::function<void()> hook;
  if (checker_) hook = [this] { checker_->check(trace_.events(), kernel_.now()); };
  kernel_.run_until(options_.until, hook);

  trace_.emit(options_.until, TraceCategory::Metric, end_snapshot());
  if (checker_) checker_->check(trace_.events(), kernel_.now());

  RunResult r;
  r.trace = trace_.events();
  r.metrics = compute_metrics(r.trace);
  return r;
}

RunResult run(const Scenario& scenario, RunOptions options) {
  Simulation sim(scenario, options);
  return sim.run();
}

std::string trace_document(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& ev : trace) {
    out += to_line(ev);
    out += '\n';
  }
  return out;
}

}  // namespace tz::sim

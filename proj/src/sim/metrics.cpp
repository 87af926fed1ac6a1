#include "tz/sim/metrics.hpp"

#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "tz/emergency.hpp"
#include "tz/state_machine.hpp"

namespace tz::sim {

namespace {

std::string str(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

bool is_metric(const TraceEvent& ev, std::string_view kind) {
  return ev.category == TraceCategory::Metric && str(ev.body, "kind") == kind;
}

std::size_t state_index(TzState s) { return static_cast<std::size_t>(s); }

}  // namespace

RunMetrics compute_metrics(std::span<const TraceEvent> trace) {
  RunMetrics m;

  std::set<std::string> emergency_names;
  for (const auto& s : default_catalog()) emergency_names.insert(s.name);

  TzState state = TzState::C;
  SimTime entered = 0;
  SimTime end = trace.empty() ? 0 : trace.back().at;
  for (const auto& ev : trace) {
    if (is_metric(ev, "init")) {
      if (auto s = parse_tz_state(str(ev.body, "state"))) state = *s;
      entered = ev.at;
      if (auto it = ev.body.find("emergency_services"); it != ev.body.end() && it->is_array()) {
        emergency_names.clear();
        for (const auto& n : *it) emergency_names.insert(n.get<std::string>());
      }
    } else if (is_metric(ev, "run_end")) {
      end = ev.at;
    }
  }

  std::set<std::pair<std::uint64_t, std::uint64_t>> audit_keys;
  for (const auto& ev : trace) {
    if (ev.category == TraceCategory::Audit) {
      audit_keys.emplace(ev.body.at("epoch").get<std::uint64_t>(),
                         ev.body.at("seq").get<std::uint64_t>());
    }
  }

  std::array<SimTime, 5> total{};
  std::array<std::uint64_t, 5> visits{};
  visits[state_index(state)] = 1;

  for (const auto& ev : trace) {
    if (ev.category == TraceCategory::Transition) {
      const auto to = parse_tz_state(str(ev.body, "to"));
      if (!to) continue;
      total[state_index(state)] += ev.at - entered;
      state = *to;
      entered = ev.at;
      ++visits[state_index(state)];
      continue;
    }
    if (ev.category != TraceCategory::Decision) continue;

    const std::string op = str(ev.body, "op");
    const std::string at_state = str(ev.body, "state");
    if (at_state == "D" || at_state == "L") {
      ++m.local_security_ops;
      const auto& a = ev.body.at("audit");
      if (a.is_object() &&
          audit_keys.contains({a.at("epoch").get<std::uint64_t>(), a.at("seq").get<std::uint64_t>()})) {
        ++m.audited_local_security_ops;
      }
    }

    if (op == "AccessDecision") {
      const std::string verdict = str(ev.body, "verdict");
      if (str(ev.body, "service") == service::kEmergencyCall) {
        ++m.emergency_call_requests;
        if (verdict != "Deny") ++m.emergency_call_grants;
      }
      if (str(ev.body, "trust") == "Untrusted" && verdict != "Deny") {
        for (const auto& g : ev.body.at("granted")) {
          if (!emergency_names.contains(g.get<std::string>())) {
            ++m.unauthorized_grants;
            break;
          }
        }
      }
    } else if (op == "ForcedDisconnect") {
      ++m.forced_reauths;
    } else if (op == "LocalAuthenticate" && str(ev.body, "outcome") == "trusted") {
      ++m.local_auth_successes;
    }
  }
  if (end > entered) total[state_index(state)] += end - entered;

  for (std::size_t i = 0; i < 5; ++i) {
    if (visits[i] > 0) {
      m.mean_time_in_state[i] = static_cast<double>(total[i]) / static_cast<double>(visits[i]);
    }
  }

  if (m.emergency_call_requests > 0) {
    m.emergency_call_availability_vacuous = false;
    m.emergency_call_availability = static_cast<double>(m.emergency_call_grants) /
                                    static_cast<double>(m.emergency_call_requests);
  }
  if (m.local_security_ops > 0) {
    m.audit_completeness_vacuous = false;
    m.audit_completeness = static_cast<double>(m.audited_local_security_ops) /
                           static_cast<double>(m.local_security_ops);
  }
  return m;
}

Json metrics_to_json(const RunMetrics& m) {
  Json j;
  j["emergency_call_availability"] = m.emergency_call_availability;
  j["emergency_call_availability_vacuous"] = m.emergency_call_availability_vacuous;
  j["emergency_call_requests"] = m.emergency_call_requests;
  j["emergency_call_grants"] = m.emergency_call_grants;
  j["audit_completeness"] = m.audit_completeness;
  j["audit_completeness_vacuous"] = m.audit_completeness_vacuous;
  j["local_security_ops"] = m.local_security_ops;
  j["audited_local_security_ops"] = m.audited_local_security_ops;
  j["unauthorized_grants"] = m.unauthorized_grants;
  j["forced_reauths"] = m.forced_reauths;
  j["local_auth_successes"] = m.local_auth_successes;
  Json t = Json::object();
  for (auto s : kAllStates) {
    const auto& v = m.mean_time_in_state[state_index(s)];
    t[std::string(to_string(s))] = v ? Json(*v) : Json(nullptr);
  }
  j["mean_time_in_state"] = std::move(t);
  return j;
}

std::string metrics_document(const RunMetrics& m) { return metrics_to_json(m).dump(2) + "\n"; }

std::string metrics_summary(const RunMetrics& m) {
  std::ostringstream os;
  os << "unauthorized_grants=" << m.unauthorized_grants
     << " emergency_call_availability=" << m.emergency_call_availability
     << (m.emergency_call_availability_vacuous ? "(vacuous)" : "")
     << " audit_completeness=" << m.audit_completeness
     << (m.audit_completeness_vacuous ? "(vacuous)" : "") << " forced_reauths=" << m.forced_reauths
     << " local_auth_successes=" << m.local_auth_successes;
  return os.str();
}

}  // namespace tz::sim

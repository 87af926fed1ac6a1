#include "tz/sim/invariants.hpp"

namespace tz::sim {

namespace {

std::string str(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

bool central_crossing(const std::string& iface) {
  if (iface == "audit-transport") return true;
  auto i = parse_interface(iface);
  return i && crosses_ec4(*i);
}

}  // namespace

InvariantViolation::InvariantViolation(std::string invariant, std::uint64_t seq,
                                       const std::string& detail)
    : std::runtime_error("invariant " + invariant + " violated at trace seq " +
                         std::to_string(seq) + ": " + detail),
      invariant_(std::move(invariant)),
      seq_(seq) {}

InvariantChecker::InvariantChecker(const TrustZone& zone, const Interconnect& bus,
                                   SimTime transient_dwell)
    : zone_(zone), bus_(bus), dwell_(transient_dwell) {
  for (const auto& s : zone.es().catalog()) emergency_names_.insert(s.name);
}

void InvariantChecker::fail(const std::string& name, std::uint64_t seq,
                            const std::string& detail) {
  throw InvariantViolation(name, seq, detail);
}

void InvariantChecker::check(const std::vector<TraceEvent>& trace, SimTime now) {
  ++checks_;
  for (; next_ < trace.size(); ++next_) scan(trace[next_]);
  const std::uint64_t seq = trace.empty() ? 0 : trace.back().seq;
  if (transient_due_ && now > *transient_due_) {
    fail("transient_resolution", seq,
         std::string(to_string(state_)) + " still unresolved at " + std::to_string(now));
  }
  check_devices(seq, now);
}

void InvariantChecker::scan(const TraceEvent& ev) {
  const Json& b = ev.body;
  switch (ev.category) {
    case TraceCategory::Transition: {
      const auto from = parse_tz_state(str(b, "from"));
      const auto to = parse_tz_state(str(b, "to"));
      if (!from || !to || !is_valid_transition(*from, *to) || *from == *to) {
        fail("valid_transition", ev.seq, str(b, "from") + "->" + str(b, "to"));
      }
      if (*from != state_) {
        fail("transition_continuity", ev.seq,
             "from " + str(b, "from") + " while in " + std::string(to_string(state_)));
      }
      if (transient_due_ && ev.at != *transient_due_) {
        fail("transient_resolution", ev.seq, "left " + str(b, "from") + " at " +
                                                 std::to_string(ev.at) + ", due " +
                                                 std::to_string(*transient_due_));
      }
      state_ = *to;
      transient_due_.reset();
      if (is_transient(*to)) transient_due_ = ev.at + dwell_;
      break;
    }
    case TraceCategory::Envelope:
      if (central_crossing(str(b, "interface")) && bus_.link_class() == Ec4Class::Lost) {
        fail("partition_faithfulness", ev.seq,
             str(b, "kind") + " delivered on " + str(b, "interface") + " while the link is Lost");
      }
      break;
    case TraceCategory::Decision: {
      const std::string op = str(b, "op");
      const std::string st = str(b, "state");
      if ((st == "D" || st == "L") && !b.at("audit").is_object()) {
        fail("audit_coverage", ev.seq, op + " for " + str(b, "ue") + " in " + st + " unaudited");
      }
      // Keeping a local origin through L-W-D is fine; granting one is not.
      if (op == "TrustChange" && str(b, "trust") == "Trusted" && str(b, "origin") == "Local" &&
          st != "L") {
        fail("local_origin_only_in_L", ev.seq, str(b, "ue") + " in " + st);
      }
      if (op == "AccessDecision") {
        const std::string route = str(b, "route");
        const std::string verdict = str(b, "verdict");
        const bool local_state = st == "L" || st == "D";
        if (route == "LocalLaa" && !local_state) fail("routing_discipline", ev.seq, "LocalLaa in " + st);
        if (route == "CentralVaaa" && local_state) fail("routing_discipline", ev.seq, "CentralVaaa in " + st);
        if (verdict == "GrantFull" && route == "None") fail("grant_route", ev.seq, str(b, "ue"));
        if (str(b, "service") == "EmergencyCall" && verdict == "Deny") {
          fail("emergency_liveness", ev.seq, str(b, "ue"));
        }
        if (str(b, "trust") == "Untrusted" && verdict != "Deny") {
          for (const auto& g : b.at("granted")) {
            if (!emergency_names_.contains(g.get<std::string>())) {
              fail("no_escalation", ev.seq,
                   "untrusted " + str(b, "ue") + " granted " + g.get<std::string>());
            }
          }
        }
      }
      break;
    }
    default:
      break;
  }
}

void InvariantChecker::check_devices(std::uint64_t seq, SimTime now) {
  const auto& zm = zone_.zm();
  for (const auto& [id, dev] : zm.devices()) {
    if (dev.trust == Trust::Trusted && dev.auth_origin == AuthOrigin::None) {
      fail("trusted_origin", seq, id + " trusted without an authentication origin");
    }
    if (dev.trust == Trust::Untrusted) {
      for (const auto& g : dev.granted) {
        if (!emergency_names_.contains(g)) {
          fail("no_escalation", seq, "untrusted " + id + " holds " + g);
        }
      }
    }
  }
  // Once the quarantine flush has run its course nothing local survives.
  const auto& entries = zm.schedule().entries;
  if (zm.state() == TzState::C && !entries.empty() && now > entries.back().disconnect_at) {
    std::optional<SimTime> r_entry;
    for (const auto& t : zm.transitions()) {
      if (t.to == TzState::R) r_entry = t.at;
    }
    for (const auto& [id, dev] : zm.devices()) {
      if (dev.attached && dev.auth_origin == AuthOrigin::Local) {
        fail("quarantine_on_reconnect", seq, id + " still locally authenticated");
      }
      if (dev.trust == Trust::Trusted &&
          (dev.auth_origin != AuthOrigin::Central || !dev.last_auth_at || !r_entry ||
           *dev.last_auth_at < *r_entry)) {
        fail("quarantine_on_reconnect", seq, id + " trusted on a pre-reconnect authentication");
      }
    }
  }
}

}  // namespace tz::sim

#include "tz/sim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>

#include <yaml-cpp/yaml.h>

namespace tz::sim {

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& d) {
  std::string out;
  for (const auto& x : d) {
    if (!out.empty()) out += "; ";
    out += "line " + std::to_string(x.line) + ": " + x.message;
  }
  return out;
}

int line_of(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  return m.is_null() ? 0 : m.line + 1;
}

class Reader {
 public:
  std::vector<Diagnostic> errors;

  void error(const YAML::Node& at, std::string message) {
    errors.push_back({line_of(at), std::move(message)});
  }

  bool require_map(const YAML::Node& n, const std::string& where) {
    if (n.IsMap()) return true;
    error(n, where + ": expected a mapping");
    return false;
  }

  void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                  const std::string& where) {
    for (const auto& kv : map) {
      const std::string key = kv.first.Scalar();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        error(kv.first, where + ": unknown field '" + key + "'");
      }
    }
  }

  template <class T>
  std::optional<T> scalar(const YAML::Node& map, const std::string& key, const std::string& where,
                          const char* type_name) {
    const YAML::Node n = map[key];
    if (!n) return std::nullopt;
    if (!n.IsScalar()) {
      error(n, where + "." + key + ": expected " + type_name);
      return std::nullopt;
    }
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      error(n, where + "." + key + ": expected " + type_name + ", got '" + n.Scalar() + "'");
      return std::nullopt;
    }
  }

  std::optional<std::int64_t> integer(const YAML::Node& map, const std::string& key,
                                      const std::string& where) {
    return scalar<std::int64_t>(map, key, where, "an integer");
  }
  std::optional<double> number(const YAML::Node& map, const std::string& key,
                               const std::string& where) {
    return scalar<double>(map, key, where, "a number");
  }
  std::optional<bool> boolean(const YAML::Node& map, const std::string& key,
                              const std::string& where) {
    return scalar<bool>(map, key, where, "a boolean");
  }
  std::optional<std::string> string(const YAML::Node& map, const std::string& key,
                                    const std::string& where) {
    return scalar<std::string>(map, key, where, "a string");
  }

  std::optional<std::string> required_string(const YAML::Node& map, const std::string& key,
                                             const std::string& where) {
    if (!map[key]) {
      error(map, where + ": missing field '" + key + "'");
      return std::nullopt;
    }
    auto v = string(map, key, where);
    if (v && v->empty()) {
      error(map[key], where + "." + key + ": must not be empty");
      return std::nullopt;
    }
    return v;
  }

  // Non-negative (or strictly positive) millisecond value.
  void millis(const YAML::Node& map, const std::string& key, const std::string& where,
              SimTime& out, bool positive) {
    auto v = integer(map, key, where);
    if (!v) return;
    if (*v < 0 || (positive && *v == 0)) {
      error(map[key], where + "." + key + ": must be " + (positive ? "positive" : "non-negative"));
      return;
    }
    out = *v;
  }

  void fraction(const YAML::Node& map, const std::string& key, const std::string& where,
                double& out) {
    auto v = number(map, key, where);
    if (!v) return;
    if (!(*v >= 0.0 && *v <= 1.0)) {
      error(map[key], where + "." + key + ": must be within [0, 1]");
      return;
    }
    out = *v;
  }
};

void read_config(Reader& r, const YAML::Node& n, SimConfig& c) {
  const std::string where = "config";
  if (!r.require_map(n, where)) return;
  r.check_keys(n,
               {"seed", "poll_period_ms", "probe_timeout_ms", "window_size",
                "weak_loss_threshold", "weak_latency_threshold_ms", "weak_throughput_threshold",
                "transient_dwell_ms", "reauth_stagger_ms", "central_auth_timeout_ms",
                "sync_period_ms", "audit_retry_ms", "disaster_ttl_ms", "restricted_capacity",
                "restricted_period_ms", "central_latency_ms", "intra_edge_latency_ms",
                "weak_latency_factor", "weak_drop", "weak_drop_high", "fault_injection", "debug"},
               where);
  if (auto v = r.integer(n, "seed", where)) {
    if (*v < 0) r.error(n["seed"], "config.seed: must be non-negative");
    else c.seed = static_cast<std::uint64_t>(*v);
  }
  r.millis(n, "poll_period_ms", where, c.poll_period, true);
  r.millis(n, "probe_timeout_ms", where, c.probe_timeout, true);
  if (auto v = r.integer(n, "window_size", where)) {
    if (*v < 1) r.error(n["window_size"], "config.window_size: must be at least 1");
    else c.thresholds.window_size = static_cast<std::size_t>(*v);
  }
  r.fraction(n, "weak_loss_threshold", where, c.thresholds.weak_loss);
  if (auto v = r.number(n, "weak_latency_threshold_ms", where)) {
    if (*v < 0) r.error(n["weak_latency_threshold_ms"], "config.weak_latency_threshold_ms: must be non-negative");
    else c.thresholds.weak_latency_ms = *v;
  }
  r.fraction(n, "weak_throughput_threshold", where, c.thresholds.weak_throughput);
  r.millis(n, "transient_dwell_ms", where, c.transient_dwell, true);
  r.millis(n, "reauth_stagger_ms", where, c.reauth_stagger, true);
  r.millis(n, "central_auth_timeout_ms", where, c.central_auth_timeout, true);
  r.millis(n, "sync_period_ms", where, c.sync_period, true);
  r.millis(n, "audit_retry_ms", where, c.audit_retry, true);
  r.millis(n, "disaster_ttl_ms", where, c.disaster_ttl, true);
  if (auto v = r.integer(n, "restricted_capacity", where)) {
    if (*v < 1) r.error(n["restricted_capacity"], "config.restricted_capacity: must be at least 1");
    else c.restricted.capacity = *v;
  }
  r.millis(n, "restricted_period_ms", where, c.restricted.period, true);
  r.millis(n, "central_latency_ms", where, c.central_latency, false);
  r.millis(n, "intra_edge_latency_ms", where, c.intra_edge_latency, false);
  r.millis(n, "weak_latency_factor", where, c.weak_latency_factor, true);
  r.fraction(n, "weak_drop", where, c.weak_drop);
  r.fraction(n, "weak_drop_high", where, c.weak_drop_high);

  if (c.probe_timeout >= c.poll_period && n["probe_timeout_ms"]) {
    r.error(n["probe_timeout_ms"], "config.probe_timeout_ms: must be shorter than poll_period_ms");
  }

  if (const YAML::Node fi = n["fault_injection"]) {
    if (r.require_map(fi, "config.fault_injection")) {
      r.check_keys(fi, {"drop_audit_acks"}, "config.fault_injection");
      if (const YAML::Node acks = fi["drop_audit_acks"]) {
        if (!acks.IsSequence()) {
          r.error(acks, "config.fault_injection.drop_audit_acks: expected a list of integers");
        } else {
          for (const auto& a : acks) {
            try {
              const auto v = a.as<std::int64_t>();
              if (v < 1) r.error(a, "config.fault_injection.drop_audit_acks: ordinals start at 1");
              else c.drop_audit_acks.insert(static_cast<std::uint64_t>(v));
            } catch (const YAML::Exception&) {
              r.error(a, "config.fault_injection.drop_audit_acks: expected an integer");
            }
          }
        }
      }
    }
  }
  if (const YAML::Node dbg = n["debug"]) {
    if (r.require_map(dbg, "config.debug")) {
      r.check_keys(dbg, {"inject_violation"}, "config.debug");
      if (auto v = r.string(dbg, "inject_violation", "config.debug")) {
        if (*v != "untrusted_grant") {
          r.error(dbg["inject_violation"],
                  "config.debug.inject_violation: unknown fault '" + *v + "'");
        } else {
          c.inject_violation = *v;
        }
      }
    }
  }
}

SubscriberEntry read_subscriber(Reader& r, const YAML::Node& n, const std::string& where,
                                std::initializer_list<std::string_view> extra_keys = {}) {
  SubscriberEntry s;
  std::vector<std::string_view> keys{"id", "credential", "sync_version", "security_log_version"};
  keys.insert(keys.end(), extra_keys.begin(), extra_keys.end());
  for (const auto& kv : n) {
    const std::string key = kv.first.Scalar();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      r.error(kv.first, where + ": unknown field '" + key + "'");
    }
  }
  if (auto v = r.required_string(n, "id", where)) s.id = *v;
  if (auto v = r.required_string(n, "credential", where)) s.credential = *v;
  if (auto v = r.integer(n, "sync_version", where)) {
    if (*v < 0) r.error(n["sync_version"], where + ".sync_version: must be non-negative");
    else s.sync_version = *v;
  }
  if (auto v = r.integer(n, "security_log_version", where)) s.security_log_version = *v;
  return s;
}

std::optional<ScenarioEvent> read_event(Reader& r, const YAML::Node& n, std::size_t index,
                                        const SimConfig& config) {
  const std::string where = "events[" + std::to_string(index) + "]";
  if (!r.require_map(n, where)) return std::nullopt;

  ScenarioEvent ev;
  ev.line = line_of(n);
  bool ok = true;

  if (!n["at"]) {
    r.error(n, where + ": missing field 'at'");
    ok = false;
  } else if (auto v = r.integer(n, "at", where)) {
    if (*v < 0) {
      r.error(n["at"], where + ".at: negative time " + std::to_string(*v));
      ok = false;
    } else {
      ev.at = *v;
    }
  } else {
    ok = false;
  }

  const auto kind = r.required_string(n, "kind", where);
  if (!kind) return std::nullopt;
  const std::string k = where + " (" + *kind + ")";

  if (*kind == "LinkQuality") {
    r.check_keys(n, {"at", "kind", "reachable", "latency_ms", "loss_rate", "throughput"}, k);
    LinkQuality lq;
    if (auto v = r.boolean(n, "reachable", k)) lq.reading.reachable = *v;
    if (auto v = r.number(n, "latency_ms", k)) {
      if (*v < 0) r.error(n["latency_ms"], k + ".latency_ms: must be non-negative");
      else lq.reading.latency_ms = *v;
    }
    r.fraction(n, "loss_rate", k, lq.reading.loss_rate);
    r.fraction(n, "throughput", k, lq.reading.throughput);
    ev.kind = lq;
  } else if (*kind == "Disaster") {
    r.check_keys(n, {"at", "kind", "event_id", "disaster", "ttl_ms"}, k);
    DisasterInput d;
    d.event.at = ev.at;
    d.event.ttl = config.disaster_ttl;
    if (auto v = r.required_string(n, "event_id", k)) d.event.event_id = *v;
    if (auto v = r.required_string(n, "disaster", k)) {
      if (auto dk = parse_disaster_kind(*v)) d.event.kind = *dk;
      else r.error(n["disaster"], k + ".disaster: unknown kind '" + *v + "'");
    }
    r.millis(n, "ttl_ms", k, d.event.ttl, true);
    ev.kind = d;
  } else if (*kind == "UeAttach") {
    r.check_keys(n, {"at", "kind", "ue", "credential"}, k);
    UeAttach a;
    if (auto v = r.required_string(n, "ue", k)) a.ue_id = *v;
    if (auto v = r.string(n, "credential", k)) a.credential = *v;
    ev.kind = a;
  } else if (*kind == "UeDetach") {
    r.check_keys(n, {"at", "kind", "ue"}, k);
    UeDetach d;
    if (auto v = r.required_string(n, "ue", k)) d.ue_id = *v;
    ev.kind = d;
  } else if (*kind == "UeAccessRequest") {
    r.check_keys(n, {"at", "kind", "ue", "service"}, k);
    UeAccessRequest q;
    if (auto v = r.required_string(n, "ue", k)) q.ue_id = *v;
    if (auto v = r.required_string(n, "service", k)) q.service = *v;
    ev.kind = q;
  } else if (*kind == "CentralProfileUpdate") {
    CentralProfileUpdate u;
    // Same fields as a subscriber entry, plus the event envelope.
    u.profile = read_subscriber(r, n, k, {"at", "kind", "in_lss"});
    if (auto v = r.boolean(n, "in_lss", k)) u.in_lss = *v;
    ev.kind = u;
  } else {
    r.error(n["kind"], where + ".kind: unknown event kind '" + *kind + "'");
    return std::nullopt;
  }
  if (!ok) return std::nullopt;
  return ev;
}

const UeId& ue_of(const EventKind& k) {
  static const UeId none;
  if (const auto* a = std::get_if<UeAttach>(&k)) return a->ue_id;
  if (const auto* d = std::get_if<UeDetach>(&k)) return d->ue_id;
  if (const auto* q = std::get_if<UeAccessRequest>(&k)) return q->ue_id;
  return none;
}

}  // namespace

ScenarioError::ScenarioError(Kind kind, std::vector<Diagnostic> diagnostics)
    : std::runtime_error((kind == Kind::Schema ? "schema error: " : "reference error: ") +
                         join_diagnostics(diagnostics)),
      kind_(kind),
      diagnostics_(std::move(diagnostics)) {}

Scenario load_scenario(const std::string& document) {
  YAML::Node root;
  try {
    root = YAML::Load(document);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(ScenarioError::Kind::Schema,
                        {{e.mark.is_null() ? 0 : e.mark.line + 1, e.msg}});
  }

  Reader r;
  Scenario sc;
  if (!root || root.IsNull() || !root.IsMap()) {
    throw ScenarioError(ScenarioError::Kind::Schema,
                        {{line_of(root), "document: expected a mapping with a 'version' field"}});
  }
  r.check_keys(root, {"version", "config", "subscribers", "lss", "events"}, "document");

  if (!root["version"]) {
    r.error(root, "version: missing (must be 1)");
  } else if (auto v = r.integer(root, "version", "document")) {
    if (*v != 1) r.error(root["version"], "version: unsupported value " + std::to_string(*v) + " (must be 1)");
  }

  if (const YAML::Node cfg = root["config"]; cfg && !cfg.IsNull()) read_config(r, cfg, sc.config);

  std::set<std::string> subscriber_ids;
  if (const YAML::Node subs = root["subscribers"]; subs && !subs.IsNull()) {
    if (!subs.IsSequence()) {
      r.error(subs, "subscribers: expected a list");
    } else {
      std::size_t i = 0;
      for (const auto& s : subs) {
        const std::string where = "subscribers[" + std::to_string(i++) + "]";
        if (!r.require_map(s, where)) continue;
        SubscriberEntry e = read_subscriber(r, s, where);
        if (!e.id.empty() && !subscriber_ids.insert(e.id).second) {
          r.error(s, where + ".id: duplicate subscriber '" + e.id + "'");
        }
        sc.subscribers.push_back(std::move(e));
      }
    }
  }

  if (const YAML::Node lss = root["lss"]; lss && !lss.IsNull()) {
    if (!lss.IsSequence()) {
      r.error(lss, "lss: expected a list of subscriber ids");
    } else {
      std::set<std::string> seen;
      for (const auto& id : lss) {
        if (!id.IsScalar()) {
          r.error(id, "lss: expected a subscriber id");
          continue;
        }
        const std::string s = id.Scalar();
        if (!subscriber_ids.contains(s)) r.error(id, "lss: '" + s + "' is not a subscriber");
        else if (!seen.insert(s).second) r.error(id, "lss: duplicate id '" + s + "'");
        else sc.lss.push_back(s);
      }
    }
  }

  if (const YAML::Node events = root["events"]; events && !events.IsNull()) {
    if (!events.IsSequence()) {
      r.error(events, "events: expected a list");
    } else {
      std::size_t i = 0;
      for (const auto& e : events) {
        if (auto ev = read_event(r, e, i, sc.config)) sc.events.push_back(std::move(*ev));
        ++i;
      }
    }
  }

  if (!r.errors.empty()) throw ScenarioError(ScenarioError::Kind::Schema, std::move(r.errors));

  std::stable_sort(sc.events.begin(), sc.events.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.at < b.at; });

  // Detach and requests must follow an attach of the same device.
  std::vector<Diagnostic> refs;
  std::set<UeId> attached;
  for (const auto& ev : sc.events) {
    if (std::holds_alternative<UeAttach>(ev.kind)) {
      attached.insert(ue_of(ev.kind));
    } else if (std::holds_alternative<UeDetach>(ev.kind)) {
      if (!attached.erase(ue_of(ev.kind))) {
        refs.push_back({ev.line, "UeDetach: '" + ue_of(ev.kind) + "' was never attached"});
      }
    } else if (std::holds_alternative<UeAccessRequest>(ev.kind)) {
      if (!attached.contains(ue_of(ev.kind))) {
        refs.push_back({ev.line, "UeAccessRequest: '" + ue_of(ev.kind) + "' is not attached"});
      }
    }
  }
  if (!refs.empty()) throw ScenarioError(ScenarioError::Kind::Reference, std::move(refs));
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error("cannot read " + path.string());
  return load_scenario(ss.str());
}

BusConfig bus_config(const SimConfig& c) {
  BusConfig b;
  b.intra_edge_latency = c.intra_edge_latency;
  b.central_latency = c.central_latency;
  b.weak_latency_factor = c.weak_latency_factor;
  b.weak_drop = c.weak_drop;
  b.weak_drop_high = c.weak_drop_high;
  b.thresholds = c.thresholds;
  return b;
}

}  // namespace tz::sim

#include "tz/cccm.hpp"

#include <algorithm>
#include <stdexcept>

#include "tz/errors.hpp"

namespace tz {

Ec4Sample Ec4Sample::from_reading(const ProbeReading& r, SimTime at) {
  if (!r.reachable) return unreachable(at);
  return {at, true, r.latency_ms, r.loss_rate, r.throughput};
}

void Ec4Sample::validate() const {
  if (loss_rate < 0.0 || loss_rate > 1.0) throw std::invalid_argument("loss_rate outside [0,1]");
  if (throughput < 0.0 || throughput > 1.0) throw std::invalid_argument("throughput outside [0,1]");
  if (reachable != latency_ms.has_value())
    throw std::invalid_argument("latency must be present iff reachable");
  if (latency_ms && *latency_ms < 0.0) throw std::invalid_argument("negative latency");
}

Ec4Sample poll_sources(const std::optional<ProbeReading>& oss,
                       const std::optional<ProbeReading>& mano, SimTime now) {
  if (!oss || !mano || !oss->reachable || !mano->reachable) return Ec4Sample::unreachable(now);
  return {now, true, std::max(oss->latency_ms, mano->latency_ms),
          std::max(oss->loss_rate, mano->loss_rate), std::min(oss->throughput, mano->throughput)};
}

Ec4Class classify_ec4(std::span<const Ec4Sample> window, const Ec4Thresholds& thresholds) {
  if (window.empty()) throw Error(ErrorCode::EmptyWindow, "classify_ec4 needs samples");
  double loss = 0.0, latency = 0.0, throughput = 0.0;
  std::size_t n = 0;
  for (const auto& s : window) {
    if (!s.reachable) continue;
    loss += s.loss_rate;
    latency += s.latency_ms.value_or(0.0);
    throughput += s.throughput;
    ++n;
  }
  if (n == 0) return Ec4Class::Lost;
  const double k = static_cast<double>(n);
  if (loss / k > thresholds.weak_loss || latency / k > thresholds.weak_latency_ms ||
      throughput / k < thresholds.weak_throughput) {
    return Ec4Class::Weak;
  }
  return Ec4Class::Healthy;
}

Ec4Class classify_reading(const ProbeReading& reading, const Ec4Thresholds& thresholds) {
  const Ec4Sample s = Ec4Sample::from_reading(reading, 0);
  return classify_ec4(std::span<const Ec4Sample>(&s, 1), thresholds);
}

std::string_view to_string(Hypothesis h) noexcept {
  switch (h) {
    case Hypothesis::Congestion: return "Congestion";
    case Hypothesis::Disaster: return "Disaster";
    case Hypothesis::Attack: return "Attack";
    case Hypothesis::Unknown: return "Unknown";
  }
  return "?";
}

Diagnosis diagnose(std::span<const Ec4Sample> window,
                   std::span<const DisasterEvent> active_disasters, bool abrupt_onset,
                   TzState state, SimTime now) {
  if (state != TzState::W && state != TzState::L) {
    throw Error(ErrorCode::WrongState,
                "diagnosis only runs in W or L, not " + std::string(to_string(state)));
  }
  Diagnosis d{now, Hypothesis::Unknown, {}};
  if (!active_disasters.empty()) {
    d.hypothesis = Hypothesis::Disaster;
    for (const auto& ev : active_disasters) d.evidence.push_back("disaster:" + ev.event_id);
    return d;
  }
  const bool lossy = std::any_of(window.begin(), window.end(), [](const Ec4Sample& s) {
    return s.reachable && s.loss_rate > 0.0;
  });
  if (lossy) {
    d.hypothesis = Hypothesis::Congestion;
    d.evidence.push_back("loss");
    return d;
  }
  if (abrupt_onset) {
    d.hypothesis = Hypothesis::Attack;
    d.evidence.push_back("abrupt_cut");
    return d;
  }
  const bool any_reachable = std::any_of(window.begin(), window.end(),
                                         [](const Ec4Sample& s) { return s.reachable; });
  d.evidence.push_back(any_reachable ? "degraded" : "unreachable");
  return d;
}

std::string_view to_string(FunctionClass f) noexcept {
  switch (f) {
    case FunctionClass::Authentication: return "Authentication";
    case FunctionClass::Authorization: return "Authorization";
    case FunctionClass::SubscriberSync: return "SubscriberSync";
    case FunctionClass::Other: return "Other";
  }
  return "?";
}

std::string_view to_string(Priority p) noexcept {
  return p == Priority::High ? "High" : "Normal";
}

std::vector<PriorityHint> priority_hints(TzState state) {
  const Priority elevated = state == TzState::W ? Priority::High : Priority::Normal;
  return {
      {FunctionClass::Authentication, elevated},
      {FunctionClass::Authorization, elevated},
      {FunctionClass::SubscriberSync, elevated},
      {FunctionClass::Other, Priority::Normal},
  };
}

Priority priority_of(std::span<const PriorityHint> hints, FunctionClass fc) noexcept {
  for (const auto& h : hints) {
    if (h.function_class == fc) return h.priority;
  }
  return Priority::Normal;
}

ConnectionMonitor::ConnectionMonitor(Ec4Thresholds thresholds) : thresholds_(thresholds) {
  if (thresholds_.window_size == 0) thresholds_.window_size = 1;
}

std::optional<Ec4Class> ConnectionMonitor::ingest(const Ec4Sample& sample) {
  window_.push_back(sample);
  if (window_.size() > thresholds_.window_size) window_.erase(window_.begin());
  if (window_.size() < thresholds_.window_size) return std::nullopt;

  const Ec4Class cls = classify_ec4(window_, thresholds_);
  ++tick_;
  if (cls == Ec4Class::Healthy) {
    last_healthy_tick_ = tick_;
    degraded_ = false;
    abrupt_onset_ = false;
  } else if (!degraded_) {
    degraded_ = true;
    abrupt_onset_ = last_healthy_tick_ && tick_ - *last_healthy_tick_ == 1;
  }
  last_class_ = cls;
  return cls;
}

Diagnosis ConnectionMonitor::diagnose(std::span<const DisasterEvent> active_disasters,
                                      TzState state, SimTime now) const {
  return tz::diagnose(window_, active_disasters, abrupt_onset_, state, now);
}

}  // namespace tz

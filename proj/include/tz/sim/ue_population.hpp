#pragma once

// Scripted user equipment. UEs never act on their own: they send what the
// scenario tells them to and remember what the zone answered.

#include <map>
#include <string>
#include <vector>

#include "tz/interconnect.hpp"
#include "tz/scheduler.hpp"

namespace tz::sim {

struct UeView {
  bool attached = false;
  std::vector<AccessResponse> responses;
  std::vector<SecurityModeCommand> security_modes;
  std::size_t forced_detaches = 0;
};

class UePopulation {
 public:
  UePopulation(Scheduler& scheduler, Interconnect& bus);

  void attach(const UeId& ue, const std::string& credential);
  void detach(const UeId& ue);
  void request(const UeId& ue, const std::string& service);

  void on_envelope(const Envelope& env);

  const std::map<UeId, UeView>& views() const noexcept { return ues_; }

 private:
  Scheduler& sched_;
  Interconnect& bus_;
  std::map<UeId, UeView> ues_;
};

}  // namespace tz::sim

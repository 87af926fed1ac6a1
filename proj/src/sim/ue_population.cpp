#include "tz/sim/ue_population.hpp"

#include "tz/overloaded.hpp"

namespace tz::sim {

UePopulation::UePopulation(Scheduler& scheduler, Interconnect& bus)
    : sched_(scheduler), bus_(bus) {
  bus_.attach(Entity::Ue, [this](const Envelope& e) { on_envelope(e); });
}

void UePopulation::attach(const UeId& ue, const std::string& credential) {
  ues_[ue].attached = true;
  bus_.send({InterfaceName::ZmUe, Entity::Ue, AttachRequest{ue, credential}, sched_.now()});
}

void UePopulation::detach(const UeId& ue) {
  ues_[ue].attached = false;
  bus_.send({InterfaceName::ZmUe, Entity::Ue, DetachNotice{ue}, sched_.now()});
}

void UePopulation::request(const UeId& ue, const std::string& service) {
  bus_.send({InterfaceName::ZmUe, Entity::Ue, AccessRequest{ue, service}, sched_.now()});
}

void UePopulation::on_envelope(const Envelope& env) {
  std::visit(overloaded{
                 [&](const AccessResponse& m) { ues_[m.ue_id].responses.push_back(m); },
                 [&](const SecurityModeCommand& m) { ues_[m.ue_id].security_modes.push_back(m); },
                 [&](const ForcedDetach& m) {
                   auto& v = ues_[m.ue_id];
                   v.attached = false;
                   ++v.forced_detaches;
                 },
                 [](const auto&) {},
             },
             env.payload);
}

}  // namespace tz::sim

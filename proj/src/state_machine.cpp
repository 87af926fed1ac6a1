#include "tz/state_machine.hpp"

#include "tz/errors.hpp"

namespace tz {

TzState next_state(TzState current, Ec4Class ec4) {
  using enum TzState;
  switch (current) {
    case C:
      switch (ec4) {
        case Ec4Class::Healthy: return C;
        case Ec4Class::Weak: return W;
        case Ec4Class::Lost: return D;
      }
      break;
    case W:
      switch (ec4) {
        case Ec4Class::Healthy: return R;
        case Ec4Class::Weak: return W;
        case Ec4Class::Lost: return D;
      }
      break;
    case L:
      // A link that comes back from L always re-enters through W.
      return ec4 == Ec4Class::Lost ? L : W;
    case R:
    case D:
      throw Error(ErrorCode::TransientInput,
                  "next_state called in transient state " + std::string(to_string(current)));
  }
  return current;
}

std::string_view to_string(TzState s) noexcept {
  switch (s) {
    case TzState::C: return "C";
    case TzState::W: return "W";
    case TzState::L: return "L";
    case TzState::R: return "R";
    case TzState::D: return "D";
  }
  return "?";
}

std::string_view to_string(Ec4Class c) noexcept {
  switch (c) {
    case Ec4Class::Healthy: return "Healthy";
    case Ec4Class::Weak: return "Weak";
    case Ec4Class::Lost: return "Lost";
  }
  return "?";
}

std::optional<TzState> parse_tz_state(std::string_view text) noexcept {
  for (auto s : kAllStates) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::optional<Ec4Class> parse_ec4_class(std::string_view text) noexcept {
  for (auto c : kAllEc4Classes) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

TransitionDriver::TransitionDriver(TzState initial, SimTime transient_dwell)
    : state_(initial), dwell_(transient_dwell) {}

std::optional<TransitionRecord> TransitionDriver::apply(Ec4Class ec4, SimTime now) {
  if (is_transient(state_)) return std::nullopt;
  const TzState to = next_state(state_, ec4);
  if (to == state_) return std::nullopt;
  TransitionRecord rec{state_, to, now, ec4};
  state_ = to;
  entered_at_ = now;
  return rec;
}

std::optional<TransitionRecord> TransitionDriver::resolve(SimTime now) {
  if (!is_transient(state_)) return std::nullopt;
  TransitionRecord rec{state_, resolve_transient(state_), now, TransientResolution{}};
  state_ = rec.to;
  entered_at_ = now;
  return rec;
}

std::optional<SimTime> TransitionDriver::resolution_due() const noexcept {
  if (!is_transient(state_)) return std::nullopt;
  return entered_at_ + dwell_;
}

}  // namespace tz

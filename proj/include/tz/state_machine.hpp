#pragma once

// Trust Zone connectivity state model.
//
// Five states driven by the quality of the edge-to-central link (EC4):
//   C  Connected          steady
//   W  Weakly connected   steady
//   L  Lost connection    steady
//   R  Reconnecting       transient, resolves to C
//   D  Disconnecting      transient, resolves to L
//
// Legal edges: C->W, C->D, W->D, W->R, D->L, L->W, R->C plus the steady
// self-loops. L->R is never legal; recovery from L always passes through W.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "tz/types.hpp"

namespace tz {

enum class TzState : std::uint8_t { C, W, L, R, D };

enum class StateCharacter : std::uint8_t { Steady, Transient };

inline constexpr std::array<TzState, 5> kAllStates{TzState::C, TzState::W, TzState::L,
                                                   TzState::R, TzState::D};

constexpr StateCharacter character(TzState s) noexcept {
  return (s == TzState::R || s == TzState::D) ? StateCharacter::Transient
                                                : StateCharacter::Steady;
}

constexpr bool is_transient(TzState s) noexcept {
  return character(s) == StateCharacter::Transient;
}

// Ordered so that Healthy > Weak > Lost compares naturally.
enum class Ec4Class : std::uint8_t { Lost = 0, Weak = 1, Healthy = 2 };

inline constexpr std::array<Ec4Class, 3> kAllEc4Classes{Ec4Class::Lost, Ec4Class::Weak,
                                                        Ec4Class::Healthy};

struct TransientResolution {
  friend constexpr bool operator==(TransientResolution, TransientResolution) { return true; }
};

using TransitionCause = std::variant<Ec4Class, TransientResolution>;

struct TransitionRecord {
  TzState from;
  TzState to;
  SimTime at;
  TransitionCause cause;

  friend bool operator==(const TransitionRecord&, const TransitionRecord&) = default;
};

constexpr bool is_valid_transition(TzState from, TzState to) noexcept {
  using enum TzState;
  if (from == to) return !is_transient(from);
  switch (from) {
    case C: return to == W || to == D;
    case W: return to == D || to == R;
    case D: return to == L;
    case L: return to == W;
    case R: return to == C;
  }
  return false;
}

/// Steady-state successor for a classified link report. Throws
/// Error{TransientInput} when `current` is R or D.
TzState next_state(TzState current, Ec4Class ec4);

constexpr TzState resolve_transient(TzState s) noexcept {
  switch (s) {
    case TzState::R: return TzState::C;
    case TzState::D: return TzState::L;
    default: return s;
  }
}

std::string_view to_string(TzState s) noexcept;
std::string_view to_string(Ec4Class c) noexcept;
std::optional<TzState> parse_tz_state(std::string_view text) noexcept;
std::optional<Ec4Class> parse_ec4_class(std::string_view text) noexcept;

/// Holds the current TZ state and applies link reports and transient
/// resolution. Self-loops never produce a record.
///
/// A report delivered while the state is transient is ignored; the next
/// report after resolution is applied normally.
class TransitionDriver {
 public:
  explicit TransitionDriver(TzState initial = TzState::C, SimTime transient_dwell = 100);

  TzState state() const noexcept { return state_; }
  SimTime transient_dwell() const noexcept { return dwell_; }

  std::optional<TransitionRecord> apply(Ec4Class ec4, SimTime now);

  /// Resolves the current transient state. Returns nothing in a steady state.
  std::optional<TransitionRecord> resolve(SimTime now);

  /// Time at which the current transient state is due to resolve.
  std::optional<SimTime> resolution_due() const noexcept;

 private:
  TzState state_;
  SimTime dwell_;
  SimTime entered_at_ = 0;
};

}  // namespace tz

#pragma once

#include <cstdint>
#include <string>

namespace tz {

// Integer milliseconds of simulation time. There is no wall clock anywhere.
using SimTime = std::int64_t;

using UeId = std::string;

enum class Trust : std::uint8_t { Untrusted, Trusted };

inline const char* to_string(Trust t) noexcept {
  return t == Trust::Trusted ? "Trusted" : "Untrusted";
}

}  // namespace tz

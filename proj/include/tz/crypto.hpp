#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tz {

using Bytes = std::vector<std::uint8_t>;

Bytes sha256(std::span<const std::uint8_t> data);

// Digest of a presented credential as stored in subscriber profiles.
Bytes credential_digest(std::string_view credential);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace tz

#pragma once

// Trace events emitted by every entity. One JSON object per line with the
// field order at, seq, category, body so that replays compare byte-for-byte.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tz/types.hpp"

namespace tz {

using Json = nlohmann::ordered_json;

enum class TraceCategory : std::uint8_t { Transition, Envelope, Decision, Audit, Metric, Drop };

std::string_view to_string(TraceCategory c) noexcept;
std::optional<TraceCategory> parse_trace_category(std::string_view text) noexcept;

struct TraceEvent {
  SimTime at = 0;
  std::uint64_t seq = 0;
  TraceCategory category = TraceCategory::Metric;
  Json body;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void emit(SimTime at, TraceCategory category, Json body) = 0;
};

/// In-memory trace; assigns a gapless seq starting at 0.
class TraceLog final : public TraceSink {
 public:
  void emit(SimTime at, TraceCategory category, Json body) override;

  const std::vector<TraceEvent>& events() const noexcept { return events_; }
  std::uint64_t last_seq() const noexcept { return events_.empty() ? 0 : events_.back().seq; }

 private:
  std::vector<TraceEvent> events_;
};

std::string to_line(const TraceEvent& ev);

/// Parses one trace line. Throws std::invalid_argument with a position
/// diagnostic when the line is not a well-formed trace record.
TraceEvent parse_trace_line(std::string_view line);

}  // namespace tz

#include "tz/trace.hpp"

#include <array>
#include <stdexcept>

namespace tz {

namespace {
constexpr std::array<TraceCategory, 6> kCategories{
    TraceCategory::Transition, TraceCategory::Envelope, TraceCategory::Decision,
    TraceCategory::Audit,      TraceCategory::Metric,   TraceCategory::Drop};
}  // namespace

std::string_view to_string(TraceCategory c) noexcept {
  switch (c) {
    case TraceCategory::Transition: return "Transition";
    case TraceCategory::Envelope: return "Envelope";
    case TraceCategory::Decision: return "Decision";
    case TraceCategory::Audit: return "Audit";
    case TraceCategory::Metric: return "Metric";
    case TraceCategory::Drop: return "Drop";
  }
  return "?";
}

std::optional<TraceCategory> parse_trace_category(std::string_view text) noexcept {
  for (auto c : kCategories) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

void TraceLog::emit(SimTime at, TraceCategory category, Json body) {
  const std::uint64_t seq = events_.size();
  events_.push_back(TraceEvent{at, seq, category, std::move(body)});
}

std::string to_line(const TraceEvent& ev) {
  Json j;
  j["at"] = ev.at;
  j["seq"] = ev.seq;
  j["category"] = std::string(to_string(ev.category));
  j["body"] = ev.body;
  return j.dump();
}

TraceEvent parse_trace_line(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object() || j.size() != 4 || !j.contains("at") || !j.contains("seq") ||
      !j.contains("category") || !j.contains("body")) {
    throw std::invalid_argument("record must have exactly the fields at, seq, category, body");
  }
  if (!j["at"].is_number_integer() || !j["seq"].is_number_unsigned() ||
      !j["category"].is_string() || !j["body"].is_object()) {
    throw std::invalid_argument("record field has the wrong type");
  }
  auto cat = parse_trace_category(j["category"].get<std::string>());
  if (!cat) throw std::invalid_argument("unknown category " + j["category"].dump());
  return TraceEvent{j["at"].get<SimTime>(), j["seq"].get<std::uint64_t>(), *cat,
                    std::move(j["body"])};
}

}  // namespace tz

#include "tz/sim/trace_io.hpp"

#include <fstream>

namespace tz::sim {

namespace {

bool is_metric_kind(const TraceEvent& ev, const char* kind) {
  if (ev.category != TraceCategory::Metric) return false;
  auto it = ev.body.find("kind");
  return it != ev.body.end() && it->is_string() && it->get<std::string>() == kind;
}

}  // namespace

TraceFileError::TraceFileError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::vector<TraceEvent> read_trace(std::istream& in) {
  std::vector<TraceEvent> out;
  std::string line;
  int n = 0;
  bool last_had_newline = true;
  while (std::getline(in, line)) {
    ++n;
    last_had_newline = !in.eof();
    TraceEvent ev;
    try {
      ev = parse_trace_line(line);
    } catch (const std::invalid_argument& e) {
      throw TraceFileError(n, e.what());
    }
    if (ev.seq != out.size()) {
      throw TraceFileError(n, "expected seq " + std::to_string(out.size()) + ", found " +
                                  std::to_string(ev.seq));
    }
    if (!out.empty() && ev.at < out.back().at) {
      throw TraceFileError(n, "time goes backwards");
    }
    out.push_back(std::move(ev));
  }
  if (out.empty()) throw TraceFileError(0, "empty trace");
  if (!is_metric_kind(out.front(), "init")) throw TraceFileError(1, "missing init record");
  if (!last_had_newline || !is_metric_kind(out.back(), "run_end")) {
    throw TraceFileError(n, "trace is truncated (no run_end record)");
  }
  return out;
}

std::vector<TraceEvent> read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_trace(in);
}

}  // namespace tz::sim

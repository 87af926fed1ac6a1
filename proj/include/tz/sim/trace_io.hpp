#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tz/trace.hpp"

namespace tz::sim {

/// A trace file that does not parse, or that stops before the run_end
/// record. `line` is 1-based.
class TraceFileError : public std::runtime_error {
 public:
  TraceFileError(int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Parses a complete trace: gapless seq from 0, non-decreasing time, an init
// record first and a run_end record last.
std::vector<TraceEvent> read_trace(std::istream& in);

// Throws std::runtime_error when the file cannot be opened.
std::vector<TraceEvent> read_trace_file(const std::filesystem::path& path);

}  // namespace tz::sim

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tz {

enum class ErrorCode {
  TransientInput,
  EmptyWindow,
  WrongState,
  UnknownUe,
  NotTrusted,
  LaaInactive,
  NotActive,
  UnknownSubscriber,
  ScopeViolation,
  NoConnectivity,
  InactiveAuditor,
  IllegalRoute,
  Unreachable,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error raised by protocol operations whose preconditions fail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tz

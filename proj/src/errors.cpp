#include "tz/errors.hpp"

namespace tz {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TransientInput: return "TransientInput";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::WrongState: return "WrongState";
    case ErrorCode::UnknownUe: return "UnknownUe";
    case ErrorCode::NotTrusted: return "NotTrusted";
    case ErrorCode::LaaInactive: return "LaaInactive";
    case ErrorCode::NotActive: return "NotActive";
    case ErrorCode::UnknownSubscriber: return "UnknownSubscriber";
    case ErrorCode::ScopeViolation: return "ScopeViolation";
    case ErrorCode::NoConnectivity: return "NoConnectivity";
    case ErrorCode::InactiveAuditor: return "InactiveAuditor";
    case ErrorCode::IllegalRoute: return "IllegalRoute";
    case ErrorCode::Unreachable: return "Unreachable";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace tz

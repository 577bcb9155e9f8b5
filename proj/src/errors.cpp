#include "steinvar/errors.hpp"

namespace steinvar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::UnsupportedSupport: return "UnsupportedSupport";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::ZeroDensity: return "ZeroDensity";
    case ErrorCode::NotIntegrable: return "NotIntegrable";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::SignViolation: return "SignViolation";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace steinvar

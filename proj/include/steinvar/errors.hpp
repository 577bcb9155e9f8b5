#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace steinvar {

enum class ErrorCode {
  InvalidParameter,
  NotNormalized,
  UnsupportedSupport,
  MissingDerivative,
  ZeroDensity,
  NotIntegrable,
  NoConvergence,
  DegenerateDenominator,
  SignViolation,
  UnsupportedOrder,
  ValidationError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI report writer) can branch on it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace steinvar

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tncert {

enum class ErrorCode {
  kParseError,
  kUndeclaredGenerator,
  kUnreducedRelator,
  kBackendRelatorViolation,
  kBallBudgetExceeded,
  kRadiusTooSmall,
  kBallMismatch,
  kShapeMismatch,
  kNotAComplex,
  kTruncatedDegree,
  kDimensionMismatch,
  kRepairSingular,
  kPsdFailedAfterRetries,
  kFingerprintMismatch,
  kConventionMismatch,
  kCapExceeded,
  kNotUnitary,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// All recoverable failures in the library are reported with this type; the
// code lets callers (and the CLI) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tncert

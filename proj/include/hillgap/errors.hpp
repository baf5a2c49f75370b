#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hillgap {

enum class ErrorCode {
  InvalidArgument,
  InvalidPotential,
  NonRealPotential,
  TruncationTooSmall,
  ConvergenceFailure,
  HypothesisNotMet,
  ValidityRegion,
  TailNotConverged,
  NoContraction,
  ImaginaryResidue,
  BoundViolated,
  RangeError,
  ComplexLeak,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All failures raised by the library.  `diagnostics` holds free-form
/// key=value context (iteration counts, residuals) for the CLI's error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string diagnostics = {})
      : std::runtime_error(message), code_(code), diagnostics_(std::move(diagnostics)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  ErrorCode code_;
  std::string diagnostics_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message, std::string diagnostics = {}) {
  throw Error(code, message, std::move(diagnostics));
}

}  // namespace hillgap

#include "hillgap/errors.hpp"

namespace hillgap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidPotential: return "InvalidPotential";
    case ErrorCode::NonRealPotential: return "NonRealPotential";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorCode::ValidityRegion: return "ValidityRegion";
    case ErrorCode::TailNotConverged: return "TailNotConverged";
    case ErrorCode::NoContraction: return "NoContraction";
    case ErrorCode::ImaginaryResidue: return "ImaginaryResidue";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::ComplexLeak: return "ComplexLeak";
  }
  return "Unknown";
}

}  // namespace hillgap

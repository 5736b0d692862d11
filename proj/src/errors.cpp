#include "phasorctl/errors.hpp"

namespace phasorctl {

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Configuration:
    case ErrorCode::WindowUnderflow:
    case ErrorCode::Parameter:
    case ErrorCode::SeedRequired:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::Precondition:
    case ErrorCode::NotPeriodic:
    case ErrorCode::TraceTooShort:
      return ErrorCategory::Validation;
    case ErrorCode::Io:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Numerical;
  }
}

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Configuration: return "configuration";
    case ErrorCode::WindowUnderflow: return "window_underflow";
    case ErrorCode::Parameter: return "parameter";
    case ErrorCode::SeedRequired: return "seed_required";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::NotPeriodic: return "not_periodic";
    case ErrorCode::TraceTooShort: return "trace_too_short";
    case ErrorCode::NearSingular: return "near_singular";
    case ErrorCode::Unstable: return "unstable";
    case ErrorCode::Numerical: return "numerical";
    case ErrorCode::ResonantSylvester: return "resonant_sylvester";
    case ErrorCode::NotStabilizable: return "not_stabilizable";
    case ErrorCode::NonConvergence: return "non_convergence";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace phasorctl

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phasorctl {

enum class ErrorCode {
  // validation
  Configuration,
  WindowUnderflow,
  Parameter,
  SeedRequired,
  DimensionMismatch,
  Precondition,
  NotPeriodic,
  TraceTooShort,
  // numerical
  NearSingular,
  Unstable,
  Numerical,
  ResonantSylvester,
  NotStabilizable,
  NonConvergence,
  Divergence,
  // environment
  Io,
};

enum class ErrorCategory { Validation, Numerical, Io };

ErrorCategory category_of(ErrorCode code);
std::string_view code_name(ErrorCode code);

/// Base exception for all library failures; the code drives CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace phasorctl

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amspec {

enum class ErrorCode {
  NonInvertible,
  NoConvergence,
  TruncationOverflow,
  PrecisionExhausted,
  Overflow,
  SaddlePoint,
  InvarianceCertificationFailed,
  ConsistencyFailure,
  StripTooWide,
  WindingNonzero,
  SingularConjugator,
  SmallDivisorBreakdown,
  ResidualTooLarge,
  PositiveNu0,
  Inconclusive,
  WindowTooSmall,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying one of the library's named failure modes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace amspec

#pragma once

#include <stdexcept>
#include <string>

namespace chanres {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  NonSquare,
  DimensionMismatch,
  NotPSD,
  NotUnitary,
  InvalidState,
  InvalidChannel,
  Infeasible,
  MaxIterations,
  UnsupportedCombination,
  UnsupportedFreeSet,
  AssertionMismatch,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidChannel: return "InvalidChannel";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::UnsupportedCombination: return "UnsupportedCombination";
    case ErrorCode::UnsupportedFreeSet: return "UnsupportedFreeSet";
    case ErrorCode::AssertionMismatch: return "AssertionMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// Every failure in the library is reported through this type. Validation
// failures additionally carry the name of the invariant that did not hold.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string invariant = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        invariant_(std::move(invariant)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  ErrorCode code_;
  std::string invariant_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message,
                              std::string invariant = {}) {
  throw Error(code, message, std::move(invariant));
}

}  // namespace chanres

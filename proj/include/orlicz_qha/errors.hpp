#pragma once

#include <stdexcept>
#include <string>

namespace oqha {

enum class ErrorCode {
  DegenerateFunction,
  DimensionMismatch,
  ConditionViolated,
  ExponentOutOfRange,
  InfeasibleTheta,
  ExponentOrderViolated,
  NotAInc1,
  Unbounded,
  GridMismatch,
  ZeroDilation,
  ConstraintViolated,
  BoundaryDecayViolated,
  TruncationViolated,
  InvalidArgument,
  ParseError,
};

const char* to_string(ErrorCode code);

// Mathematical failures carry a code so callers (tests, CLI exit codes) can
// dispatch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Malformed input, as opposed to a well-formed but infeasible request.
inline bool is_input_error(ErrorCode code) {
  return code == ErrorCode::ParseError || code == ErrorCode::InvalidArgument ||
         code == ErrorCode::DimensionMismatch || code == ErrorCode::GridMismatch;
}

}  // namespace oqha

#include "orlicz_qha/errors.hpp"

namespace oqha {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateFunction: return "DegenerateFunction";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorCode::InfeasibleTheta: return "InfeasibleTheta";
    case ErrorCode::ExponentOrderViolated: return "ExponentOrderViolated";
    case ErrorCode::NotAInc1: return "NotAInc1";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ZeroDilation: return "ZeroDilation";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::BoundaryDecayViolated: return "BoundaryDecayViolated";
    case ErrorCode::TruncationViolated: return "TruncationViolated";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace oqha

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netorch {

// Every failure the library raises carries one of these codes so callers
// (and the CLI exit-code mapping) can dispatch without string matching.
enum class ErrorCode {
  // registry / descriptors
  kDuplicateModelId,
  kInvalidDescriptor,
  kUnknownField,
  // parsing and IO
  kParseError,
  kIoError,
  kEnvelopeParseError,
  // planner / executor
  kUnrecognizedIntent,
  kBackendError,
  kPlanRejected,
  kPlanInvalid,
  // selector / executor
  kNoModelForTask,
  kDimensionMismatch,
  // solvers
  kInvalidProblem,
  kInfeasibleInput,
  kNonConvergence,
  // embedding / vectors
  kShapeMismatch,
  kAllZero,
  // simulation environment
  kInvalidGeometry,
  kIndexOutOfRange,
  // memory
  kUnknownRecord,
  kInvalidRating,
  // llm gateway
  kTransportError,
  kProtocolError,
  kAuthError,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateModelId: return "DuplicateModelId";
    case ErrorCode::kInvalidDescriptor: return "InvalidDescriptor";
    case ErrorCode::kUnknownField: return "UnknownField";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEnvelopeParseError: return "EnvelopeParseError";
    case ErrorCode::kUnrecognizedIntent: return "UnrecognizedIntent";
    case ErrorCode::kBackendError: return "BackendError";
    case ErrorCode::kPlanRejected: return "PlanRejected";
    case ErrorCode::kPlanInvalid: return "PlanInvalid";
    case ErrorCode::kNoModelForTask: return "NoModelForTask";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidProblem: return "InvalidProblem";
    case ErrorCode::kInfeasibleInput: return "InfeasibleInput";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kAllZero: return "AllZero";
    case ErrorCode::kInvalidGeometry: return "InvalidGeometry";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kUnknownRecord: return "UnknownRecord";
    case ErrorCode::kInvalidRating: return "InvalidRating";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kAuthError: return "AuthError";
  }
  return "UnknownError";
}

}  // namespace netorch

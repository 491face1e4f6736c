#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qwtime {

enum class ErrorCode {
  InvalidGridSize,
  RepresentationMismatch,
  GridMismatch,
  NotUnitary,
  NotUnimodular,
  PhaseStepTooLarge,
  GridTooCoarse,
  DegenerateEigenvalue,
  InvalidParameter,
  SupportMarginViolated,
  DomainViolation,
  NoZeroFreeDomain,
  NoStrongTimeOperator,
  NotNormalized,
  NotSymmetric,
  BranchNotMonotone,
  NotSelfAdjointCase,
  EigenvaluesCoincide,
  InvalidWeights,
  SchemaViolation,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGridSize: return "InvalidGridSize";
    case ErrorCode::RepresentationMismatch: return "RepresentationMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::PhaseStepTooLarge: return "PhaseStepTooLarge";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::SupportMarginViolated: return "SupportMarginViolated";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::NoZeroFreeDomain: return "NoZeroFreeDomain";
    case ErrorCode::NoStrongTimeOperator: return "NoStrongTimeOperator";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::BranchNotMonotone: return "BranchNotMonotone";
    case ErrorCode::NotSelfAdjointCase: return "NotSelfAdjointCase";
    case ErrorCode::EigenvaluesCoincide: return "EigenvaluesCoincide";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qwtime

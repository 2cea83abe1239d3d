#pragma once

#include <exception>
#include <sstream>
#include <string>
#include <vector>

namespace ghkit {

// Machine-readable error codes shared by the library and the CLI.
enum class ErrorCode {
  Asymmetric,
  NonzeroDiagonal,
  NonpositiveOffDiagonal,
  TriangleViolation,
  NonpositiveScale,
  EmptySubset,
  BasePointNotInSubset,
  NonpositiveCross,
  DistortionTooLarge,
  DeltaTooSmall,
  MiddleSpaceMismatch,
  IndexOutOfRange,
  PointedConstraintViolated,
  CoverageFailure,
  BallNotNested,
  BudgetExceeded,
  NoFeasibleSchedule,
  NoCommonSubsequence,
  AmbiguousLimitPoint,
  NotBiLipschitz,
  BadDescriptor,
  FileFormat,
  Usage,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Asymmetric: return "Asymmetric";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::NonpositiveOffDiagonal: return "NonpositiveOffDiagonal";
    case ErrorCode::TriangleViolation: return "TriangleViolation";
    case ErrorCode::NonpositiveScale: return "NonpositiveScale";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::BasePointNotInSubset: return "BasePointNotInSubset";
    case ErrorCode::NonpositiveCross: return "NonpositiveCross";
    case ErrorCode::DistortionTooLarge: return "DistortionTooLarge";
    case ErrorCode::DeltaTooSmall: return "DeltaTooSmall";
    case ErrorCode::MiddleSpaceMismatch: return "MiddleSpaceMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::PointedConstraintViolated: return "PointedConstraintViolated";
    case ErrorCode::CoverageFailure: return "CoverageFailure";
    case ErrorCode::BallNotNested: return "BallNotNested";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NoFeasibleSchedule: return "NoFeasibleSchedule";
    case ErrorCode::NoCommonSubsequence: return "NoCommonSubsequence";
    case ErrorCode::AmbiguousLimitPoint: return "AmbiguousLimitPoint";
    case ErrorCode::NotBiLipschitz: return "NotBiLipschitz";
    case ErrorCode::BadDescriptor: return "BadDescriptor";
    case ErrorCode::FileFormat: return "FileFormat";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

// Domain error with witness indices and an optional numeric payload
// (e.g. the slack of a violated triangle inequality).
class Error : public std::exception {
 public:
  Error(ErrorCode code, std::string detail, std::vector<int> indices = {},
        double value = 0.0)
      : code_(code),
        detail_(std::move(detail)),
        indices_(std::move(indices)),
        value_(value) {
    std::ostringstream os;
    os << error_code_name(code_);
    if (!indices_.empty()) {
      os << "(";
      for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (k) os << ",";
        os << indices_[k];
      }
      os << ")";
    }
    if (!detail_.empty()) os << ": " << detail_;
    what_ = os.str();
  }

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }
  const std::vector<int>& indices() const { return indices_; }
  double value() const { return value_; }
  const char* what() const noexcept override { return what_.c_str(); }

 private:
  ErrorCode code_;
  std::string detail_;
  std::vector<int> indices_;
  double value_;
  std::string what_;
};

}  // namespace ghkit

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace sdl {

enum class ErrorCode {
  NonFiniteCoefficient,
  StepUnderflow,
  NonFiniteIntegrand,
  MaxSubdivisions,
  StencilOutsideDomain,
  UnknownKind,
  DoubleZeroDetected,
  ConvexityViolated,
  DomainError,
  DegenerateTangent,
  InversionSingularity,
  HypothesisFailed,
  ZeroConformalFactor,
  PositiveCurvature,
  PathOutsideDisk,
  Disconnected,
  OutOfGrid,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteCoefficient: return "NonFiniteCoefficient";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::MaxSubdivisions: return "MaxSubdivisions";
    case ErrorCode::StencilOutsideDomain: return "StencilOutsideDomain";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::DoubleZeroDetected: return "DoubleZeroDetected";
    case ErrorCode::ConvexityViolated: return "ConvexityViolated";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DegenerateTangent: return "DegenerateTangent";
    case ErrorCode::InversionSingularity: return "InversionSingularity";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::ZeroConformalFactor: return "ZeroConformalFactor";
    case ErrorCode::PositiveCurvature: return "PositiveCurvature";
    case ErrorCode::PathOutsideDisk: return "PathOutsideDisk";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::OutOfGrid: return "OutOfGrid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Single exception type for the library. `where` carries the offending
/// abscissa (or modulus, for disk points) when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<double> where = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), where_(where) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<double> where() const noexcept { return where_; }

 private:
  ErrorCode code_;
  std::optional<double> where_;
};

}  // namespace sdl

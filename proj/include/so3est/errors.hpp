#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace so3est {

enum class ErrorCode {
  InvalidArgument,
  ShapeMismatch,
  NotSkew,
  NotRotation,
  NotSymmetricPD,
  RankDeficient,
  SingularProfile,
  ReflectionProfile,
  PotentialGradientNotSkewCompatible,
  StepTooLarge,
  InconsistentUpdate,
  MissingGyro,
  GoldenMismatch,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotSkew: return "NotSkew";
    case ErrorCode::NotRotation: return "NotRotation";
    case ErrorCode::NotSymmetricPD: return "NotSymmetricPD";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularProfile: return "SingularProfile";
    case ErrorCode::ReflectionProfile: return "ReflectionProfile";
    case ErrorCode::PotentialGradientNotSkewCompatible: return "PotentialGradientNotSkewCompatible";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::InconsistentUpdate: return "InconsistentUpdate";
    case ErrorCode::MissingGyro: return "MissingGyro";
    case ErrorCode::GoldenMismatch: return "GoldenMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Single exception type for the library; the code drives CLI exit status.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace so3est

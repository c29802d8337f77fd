#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gasaug {

enum class ErrorCode {
  // alpha-shape
  TooFewPoints,
  DegenerateGeometry,
  EmptyAlphaComplex,
  // gas generation
  NOutOfRange,
  EmptyMesh,
  EmptySource,
  GenerationFailed,
  // augmentation / resampling
  EmptyPool,
  OriginPoint,
  InvalidSensorSpec,
  // evaluation
  NoGroundTruth,
  InvalidLabel,
  // io
  IoError,
  MalformedFile,
  ParseError,
  InvalidArgument,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::EmptyAlphaComplex: return "EmptyAlphaComplex";
    case ErrorCode::NOutOfRange: return "NOutOfRange";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::OriginPoint: return "OriginPoint";
    case ErrorCode::InvalidSensorSpec: return "InvalidSensorSpec";
    case ErrorCode::NoGroundTruth: return "NoGroundTruth";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Data errors come from bad inputs rather than bugs; the CLI maps them to exit code 2.
  bool is_data_error() const noexcept {
    return code_ != ErrorCode::InvalidArgument;
  }

 private:
  ErrorCode code_;
};

}  // namespace gasaug

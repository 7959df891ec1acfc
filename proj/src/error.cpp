#include "earlywarn/error.hpp"

namespace earlywarn {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownCourse: return "UnknownCourse";
    case ErrorCode::EmptyCourse: return "EmptyCourse";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidHorizon: return "InvalidHorizon";
    case ErrorCode::UnassignedCohort: return "UnassignedCohort";
    case ErrorCode::DegenerateBatch: return "DegenerateBatch";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::SingleClassTrainingSet: return "SingleClassTrainingSet";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ClassOutOfRange: return "ClassOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::TrainingFailed: return "TrainingFailed";
    case ErrorCode::NumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidHorizon:
      return ErrorKind::Usage;
    case ErrorCode::DegenerateBatch:
    case ErrorCode::TrainingFailed:
    case ErrorCode::NumericFailure:
      return ErrorKind::Numeric;
    default:
      return ErrorKind::Data;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace earlywarn

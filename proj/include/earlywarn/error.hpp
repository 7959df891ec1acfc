#pragma once

#include <stdexcept>
#include <string>

namespace earlywarn {

enum class ErrorCode {
  MissingFile,
  SchemaError,
  ParseError,
  UnknownCourse,
  EmptyCourse,
  ShapeMismatch,
  InvalidHorizon,
  UnassignedCohort,
  DegenerateBatch,
  InvalidTarget,
  EmptySeries,
  SingleClassTrainingSet,
  LengthMismatch,
  ClassOutOfRange,
  InvalidConfig,
  IoError,
  TrainingFailed,
  NumericFailure,
};

// Coarse family of an error; the CLI maps these onto exit codes 1/2/3.
enum class ErrorKind { Usage, Data, Numeric };

const char* to_string(ErrorCode code);
ErrorKind kind_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace earlywarn

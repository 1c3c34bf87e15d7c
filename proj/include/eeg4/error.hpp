#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eeg4 {

enum class ErrorCode {
  // recording_io
  MissingColumn,
  BadTaskLabel,
  NonMonotonicTimestamp,
  EmptyTask,
  NoTaskMarkers,
  ClockSkew,
  BoundaryCountMismatch,
  MalformedRow,
  // cleaning / crossval
  NoUsableFolds,
  AllSubjectsExcluded,
  // learners
  DegenerateTrainingSet,
  SingularCovariance,
  DimensionMismatch,
  // report
  MissingAlgorithm,
  AccountingMismatch,
  // plumbing
  InvalidConfig,
  Io,
  Internal,
};

std::string_view error_code_name(ErrorCode code);

// Exit-code class of an error: 2 usage, 3 data, 4 internal.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eeg4

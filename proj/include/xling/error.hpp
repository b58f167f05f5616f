#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xling {

// Failure categories. The CLI maps each category onto a process exit code.
enum class ErrorKind {
  kUsage,      // bad arguments, missing paths, malformed input files
  kData,       // model/corpus content problems, dimension mismatches
  kNumerical,  // SVD non-convergence and similar
};

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kMissingCounterpart,
  kMalformedRecord,
  kTruncatedStream,
  kDegenerateCorpus,
  kEmptyCorpus,
  kDomain,
  kUndefinedRate,
  kCorruptModel,
  kVersionMismatch,
  kDimensionMismatch,
  kConvergenceFailure,
  kEmptyCandidates,
  kMissingGold,
  kSelfTestFailure,
  kPrecondition,
  kProvider,
};

std::string_view error_code_name(ErrorCode code) noexcept;
ErrorKind error_kind(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return error_kind(code_); }

 private:
  ErrorCode code_;
};

// Error tied to a 1-based line of an input file.
class RecordError : public Error {
 public:
  RecordError(ErrorCode code, std::size_t line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace xling

#include "xling/error.hpp"

namespace xling {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMissingCounterpart: return "missing-counterpart";
    case ErrorCode::kMalformedRecord: return "malformed-record";
    case ErrorCode::kTruncatedStream: return "truncated-stream";
    case ErrorCode::kDegenerateCorpus: return "degenerate-corpus";
    case ErrorCode::kEmptyCorpus: return "empty-corpus";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kUndefinedRate: return "undefined-rate";
    case ErrorCode::kCorruptModel: return "corrupt-model";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kConvergenceFailure: return "convergence-failure";
    case ErrorCode::kEmptyCandidates: return "empty-candidates";
    case ErrorCode::kMissingGold: return "missing-gold";
    case ErrorCode::kSelfTestFailure: return "self-test-failure";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kProvider: return "provider";
  }
  return "unknown";
}

ErrorKind error_kind(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIo:
    case ErrorCode::kMissingCounterpart:
    case ErrorCode::kMalformedRecord:
    case ErrorCode::kTruncatedStream:
      return ErrorKind::kUsage;
    case ErrorCode::kConvergenceFailure:
      return ErrorKind::kNumerical;
    default:
      return ErrorKind::kData;
  }
}

}  // namespace xling

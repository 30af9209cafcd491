#include "glsc/error.hpp"

namespace glsc {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "ERR_INVALID_ARGUMENT";
    case ErrorCode::kIo: return "ERR_IO";
    case ErrorCode::kParse: return "ERR_PARSE";
    case ErrorCode::kDimMismatch: return "ERR_DIM_MISMATCH";
    case ErrorCode::kBadMagic: return "ERR_BAD_MAGIC";
    case ErrorCode::kNonFinite: return "ERR_NONFINITE";
    case ErrorCode::kDupSegmentId: return "ERR_DUP_SEGMENT_ID";
    case ErrorCode::kZeroVector: return "ERR_ZERO_VECTOR";
    case ErrorCode::kEmptyCluster: return "ERR_EMPTY_CLUSTER";
    case ErrorCode::kTooFewPoints: return "ERR_TOO_FEW_POINTS";
    case ErrorCode::kKTooLarge: return "ERR_K_TOO_LARGE";
    case ErrorCode::kEmptyReference: return "ERR_EMPTY_REFERENCE";
    case ErrorCode::kEmptyCorpus: return "ERR_EMPTY_CORPUS";
    case ErrorCode::kUnpairedSession: return "ERR_UNPAIRED_SESSION";
    case ErrorCode::kMissingHypothesis: return "ERR_MISSING_HYPOTHESIS";
    case ErrorCode::kMissingEmbedding: return "ERR_MISSING_EMBEDDING";
    case ErrorCode::kMalformedLabel: return "ERR_MALFORMED_LABEL";
    case ErrorCode::kMalformed: return "ERR_MALFORMED";
    case ErrorCode::kNegativeRelativeTime: return "ERR_NEGATIVE_RELATIVE_TIME";
    case ErrorCode::kSeparationInfeasible: return "ERR_SEPARATION_INFEASIBLE";
  }
  return "ERR_UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

ParseError::ParseError(std::size_t offset, const std::string& message)
    : Error(ErrorCode::kMalformed,
            message + " (at byte " + std::to_string(offset) + ")"),
      offset_(offset) {}

}  // namespace glsc

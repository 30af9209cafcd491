#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace glsc {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParse,
  kDimMismatch,
  kBadMagic,
  kNonFinite,
  kDupSegmentId,
  kZeroVector,
  kEmptyCluster,
  kTooFewPoints,
  kKTooLarge,
  kEmptyReference,
  kEmptyCorpus,
  kUnpairedSession,
  kMissingHypothesis,
  kMissingEmbedding,
  kMalformedLabel,
  kMalformed,
  kNegativeRelativeTime,
  kSeparationInfeasible,
};

// Stable identifier used in reports and log lines, e.g. "ERR_DIM_MISMATCH".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by strict SOT parsing; carries the byte offset of the first violation.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message);

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace glsc

#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "glsc/transcript.hpp"

namespace glsc {

/// Normalized, non-empty, whitespace-free unit of a transcript.
struct Token {
  std::string text;

  friend bool operator==(const Token&, const Token&) = default;
  friend auto operator<=>(const Token&, const Token&) = default;
};

using TokenSeq = std::vector<Token>;

enum class TokenMode { kWord, kChar, kAuto };

std::string_view to_string(TokenMode mode);
// Accepts "word", "char", "auto"; throws kInvalidArgument otherwise.
TokenMode parse_token_mode(std::string_view name);

/// Splits text into tokens.
///
/// kWord splits on whitespace runs, kChar emits one token per non-whitespace
/// code point, kAuto emits CJK code points individually and groups runs of
/// other non-whitespace code points into words. Every token is lowercased
/// (Latin) and stripped of leading/trailing punctuation; tokens that become
/// empty are dropped.
TokenSeq tokenize(std::string_view text, TokenMode mode);

/// Error decomposition of one minimum-cost alignment.
struct AlignmentStats {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t correct = 0;
  std::int64_t ref_len = 0;

  std::int64_t errors() const { return substitutions + deletions + insertions; }

  AlignmentStats& operator+=(const AlignmentStats& other);
  friend AlignmentStats operator+(AlignmentStats a, const AlignmentStats& b) {
    return a += b;
  }
  friend bool operator==(const AlignmentStats&, const AlignmentStats&) = default;
};

/// Unit-cost Levenshtein alignment. Among minimum-cost alignments the
/// backtrace from the end prefers match/substitution, then deletion, then
/// insertion, so the decomposition is deterministic.
AlignmentStats align(const TokenSeq& ref, const TokenSeq& hyp);

/// Minimum edit distance only (two-row DP, O(min) memory).
std::int64_t edit_distance(const TokenSeq& ref, const TokenSeq& hyp);

inline constexpr double kUndefinedRatio = std::numeric_limits<double>::infinity();

inline bool is_undefined(double ratio) { return ratio == kUndefinedRatio; }

/// (S + D + I) / ref_len. Returns 0 for an empty reference with no errors
/// and kUndefinedRatio for an empty reference with insertions.
double wer(const AlignmentStats& stats);
double error_ratio(std::int64_t errors, std::int64_t ref_len);

// Concatenates the session's utterances in chronological order, ignoring speakers.
TokenSeq concat_chronological(const Session& session, TokenMode mode);

AlignmentStats session_alignment(const Session& ref, const Session& hyp, TokenMode mode);
double session_wer(const Session& ref, const Session& hyp, TokenMode mode);

}  // namespace glsc

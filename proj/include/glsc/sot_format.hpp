#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "glsc/glsc_pipeline.hpp"
#include "glsc/transcript.hpp"

namespace glsc {

enum class SotTask { kSdr, kGlsc };

std::string_view task_token(SotTask task);  // "<|SDR|>" or "<|GLSC|>"

/// One speaker turn. GLSC sequences carry a single item whose speaker is the
/// composite label and whose times are zero.
struct SotItem {
  double start = 0.0;
  double end = 0.0;
  std::string speaker;
  std::string text;

  friend bool operator==(const SotItem&, const SotItem&) = default;
};

struct SotSequence {
  SotTask task = SotTask::kSdr;
  std::vector<SotItem> items;

  friend bool operator==(const SotSequence&, const SotSequence&) = default;
};

inline constexpr double kDefaultResolution = 0.1;

/// Free-text escaping: '<', '|', '\\' and control characters become \uXXXX.
std::string escape_payload(std::string_view text);

/// Number of decimals needed to render multiples of `resolution` exactly
/// (0.1 -> 1, 0.25 -> 2, 1 -> 0). Throws kInvalidArgument for resolution <= 0.
int resolution_decimals(double resolution);

/// Seconds rounded to the nearest multiple of `resolution`, rendered with
/// resolution_decimals digits.
std::string format_timestamp(double seconds, double resolution = kDefaultResolution);

/// The value parse() reads back from format_timestamp(seconds, resolution).
double quantize_timestamp(double seconds, double resolution = kDefaultResolution);

/// `<|SDR|>` then `<|ts:S|><|ts:E|><|spk:L|>text` per utterance in (start, end)
/// order, times relative to the group start. Throws kInvalidArgument on an
/// empty group and kNegativeRelativeTime when an utterance precedes it.
std::string serialize_sdr(const TurnGroup& group, double resolution = kDefaultResolution);

/// `<|GLSC|><|spk:G{g}-L{u}|>text`.
std::string serialize_glsc(const SegmentRecord& segment, GlscLabel label);

/// Canonical rendering of a parsed sequence.
std::string serialize(const SotSequence& sequence, double resolution = kDefaultResolution);

/// Structure serialize_sdr encodes, with times already quantized.
SotSequence sdr_sequence(const TurnGroup& group, double resolution = kDefaultResolution);

struct SotDiagnostic {
  std::size_t offset = 0;
  std::string message;
};

struct SotParseResult {
  SotSequence sequence;
  std::vector<SotDiagnostic> diagnostics;
};

/// Strict mode throws ParseError at the first violation. Lenient mode never
/// throws: malformed tags and stray text are skipped, a missing end timestamp
/// becomes end = start, items left without a speaker are dropped, invalid
/// UTF-8 is replaced by U+FFFD and out-of-order items are re-sorted. Every
/// repair is recorded as a diagnostic. Lenient offsets refer to the input
/// after UTF-8 repair.
SotParseResult parse_sot(std::string_view sequence, bool lenient);

/// SDR items as utterances of `session_id`, shifted by `offset` seconds.
std::vector<Utterance> sot_utterances(const SotSequence& sequence, const std::string& session_id,
                                      double offset = 0.0);

}  // namespace glsc

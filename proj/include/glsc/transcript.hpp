#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace glsc {

/// One speaker-attributed, time-stamped transcript unit. Text is kept raw;
/// tokenization happens at scoring time so the token mode stays a caller
/// decision.
struct Utterance {
  std::string session_id;
  std::string speaker_id;
  double start = 0.0;
  double end = 0.0;
  std::string text;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// All utterances of one recording, in input order.
struct Session {
  std::string session_id;
  std::vector<Utterance> utterances;

  friend bool operator==(const Session&, const Session&) = default;
};

// Indices of `utterances` sorted by (start, end, input index).
std::vector<std::size_t> chronological_order(const std::vector<Utterance>& utterances);

// Throws ErrorCode::kInvalidArgument when end < start, start < 0, the speaker
// id is empty, or an utterance belongs to a different session.
void validate(const Session& session);

}  // namespace glsc

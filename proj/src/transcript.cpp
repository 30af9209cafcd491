#include "glsc/transcript.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "glsc/error.hpp"

namespace glsc {

std::vector<std::size_t> chronological_order(const std::vector<Utterance>& utterances) {
  std::vector<std::size_t> order(utterances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(utterances[a].start, utterances[a].end) <
           std::tie(utterances[b].start, utterances[b].end);
  });
  return order;
}

void validate(const Session& session) {
  for (const auto& u : session.utterances) {
    if (u.session_id != session.session_id) {
      throw Error(ErrorCode::kInvalidArgument,
                  "utterance of session '" + u.session_id + "' inside session '" +
                      session.session_id + "'");
    }
    if (u.speaker_id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty speaker id in session " + u.session_id);
    }
    if (!std::isfinite(u.start) || !std::isfinite(u.end) || u.start < 0.0 || u.end < u.start) {
      throw Error(ErrorCode::kInvalidArgument,
                  "invalid time interval in session " + u.session_id);
    }
  }
}

}  // namespace glsc

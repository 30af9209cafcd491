#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glsc/text_metrics.hpp"
#include "glsc/transcript.hpp"

namespace glsc {

/// One slot of a speaker pairing; nullopt stands for an EMPTY pad speaker.
struct SpeakerPair {
  std::optional<std::string> ref;
  std::optional<std::string> hyp;

  friend bool operator==(const SpeakerPair&, const SpeakerPair&) = default;
};

/// Perfect matching between reference and hypothesis speakers, padded with
/// EMPTY speakers on the smaller side. Ordered by reference speaker id with
/// EMPTY reference slots last.
struct SpeakerMapping {
  std::vector<SpeakerPair> pairs;

  friend bool operator==(const SpeakerMapping&, const SpeakerMapping&) = default;
};

struct CpwerResult {
  std::int64_t errors = 0;
  std::int64_t ref_len = 0;
  SpeakerMapping mapping;

  // ERR_EMPTY_REFERENCE condition: no reference tokens but a non-empty hypothesis.
  bool undefined() const { return ref_len == 0 && errors > 0; }
  double value() const { return error_ratio(errors, ref_len); }
};

enum class CpwerSolver { kAssignment, kExhaustive };

/// Per-speaker token streams, utterances in (start, end, input order).
std::map<std::string, TokenSeq> concat_by_speaker(const Session& session, TokenMode mode);

/// Concatenated minimum-permutation WER. Equal-cost matchings resolve to the
/// lexicographically smallest pairing (reference ids ascending, each taking
/// the smallest feasible hypothesis id, EMPTY sorting after real ids).
CpwerResult cpwer(const Session& ref, const Session& hyp, TokenMode mode,
                  CpwerSolver solver = CpwerSolver::kAssignment);

/// cpwer - wer, propagating the undefined sentinel.
double delta_cp(double cpwer_value, double wer_value);

struct SessionPair {
  const Session* ref = nullptr;
  const Session* hyp = nullptr;
};

std::size_t distinct_speakers(const Session& session);

/// Fraction of pairs whose hypothesis has exactly the reference speaker count.
/// Throws kEmptyCorpus on an empty list.
double sca(std::span<const SessionPair> pairs);

/// Pairs sessions by session_id (sorted by id). Throws kUnpairedSession when an
/// id exists on only one side.
std::vector<SessionPair> pair_sessions(const std::vector<Session>& refs,
                                       const std::vector<Session>& hyps);

struct SessionMetrics {
  std::string session_id;
  AlignmentStats wer_stats;
  CpwerResult cp;
  std::size_t ref_speaker_count = 0;
  std::size_t hyp_speaker_count = 0;

  double wer() const { return glsc::wer(wer_stats); }
  double cpwer() const { return cp.value(); }
  double delta_cp() const { return glsc::delta_cp(cpwer(), wer()); }
};

struct CorpusMetrics {
  std::int64_t wer_errors = 0;
  std::int64_t cpwer_errors = 0;
  std::int64_t ref_len = 0;
  double wer = 0.0;
  double cpwer = 0.0;
  double delta_cp = 0.0;
  double sca = 0.0;
};

struct MetricsReport {
  std::vector<SessionMetrics> per_session;
  CorpusMetrics corpus;
};

SessionMetrics evaluate_session(const Session& ref, const Session& hyp, TokenMode mode);

/// Scores every paired session; corpus WER/cpWER pool raw error counts and
/// reference lengths (micro-average). Per-session work fans out over
/// `threads` workers; the result does not depend on the worker count.
MetricsReport evaluate_corpus(const std::vector<Session>& refs,
                              const std::vector<Session>& hyps, TokenMode mode,
                              unsigned threads = 1);

/// Ratio rendered as a percentage with two decimals, or "undefined".
std::string format_percent(double ratio);

std::string render_table(const MetricsReport& report);
std::string render_json(const MetricsReport& report);

}  // namespace glsc

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "glsc/embedding_store.hpp"
#include "glsc/transcript.hpp"

namespace glsc {

struct CountRange {
  std::size_t lo = 0;
  std::size_t hi = 0;  // inclusive
};

/// Generator knobs. All draws come from one mt19937_64 stream seeded by `seed`.
struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t n_speakers = 6;
  std::size_t n_sessions = 4;
  CountRange speakers_per_session{2, 4};
  CountRange utterances_per_session{8, 16};
  CountRange words_per_utterance{3, 10};
  std::size_t vocab_size = 500;
  double sub_rate = 0.0;
  double del_rate = 0.0;
  double ins_rate = 0.0;
  double attribution_error_rate = 0.0;
  std::size_t embedding_dim = 64;
  double intra_speaker_sigma = 0.02;
  double inter_speaker_min_angle = 1.0;  // radians
  // Share of every speaker centroid along one common direction; pulls the
  // speakers together relative to uniform outliers.
  double common_direction_weight = 0.0;
  std::size_t n_outliers = 0;
};

/// Throws kInvalidArgument on out-of-range fields.
void validate(const SynthSpec& spec);

struct SessionTruth {
  std::string session_id;
  std::size_t ref_speakers = 0;
  std::int64_t ref_len = 0;
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::size_t reassignments = 0;

  std::int64_t errors() const { return substitutions + deletions + insertions; }
};

struct CorpusTruth {
  std::vector<SessionTruth> sessions;
  std::int64_t ref_len = 0;
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::size_t reassignments = 0;

  std::int64_t errors() const { return substitutions + deletions + insertions; }
};

struct SynthCorpus {
  std::vector<Session> refs;
  std::vector<Session> hyps;
  // Hypothesis text keyed by reference segment id (see utterance_ids).
  std::map<std::string, std::string> segment_hyps;
  CorpusTruth truth;
};

/// Reference sessions of sequential, non-overlapping turns over words "w<n>".
/// Hypotheses substitute, delete and insert tokens at the given rates (inserted
/// and substituted tokens come from a disjoint "x<n>" vocabulary) and move
/// utterances to another speaker of the same session with probability
/// attribution_error_rate, never leaving a speaker without utterances. Each
/// session either deletes or inserts, never both: it deletes with probability
/// del_rate / (del_rate + ins_rate) and then applies that kind at rate
/// del_rate + ins_rate, so the per-token rates hold in expectation. The
/// recorded counts are then exactly what alignment measures, split included.
SynthCorpus gen_corpus(const SynthSpec& spec);

struct SynthEmbeddings {
  EmbeddingStore store;
  // Speaker index (position in the sorted speaker list) per segment; outliers
  // are -1.
  std::map<std::string, int> truth;
  std::vector<std::vector<double>> centroids;
};

/// One unit centroid per distinct speaker of `speaker_of` (segment -> speaker),
/// pairwise separated by at least inter_speaker_min_angle; segment vectors are
/// centroid + N(0, sigma^2) noise, renormalized. n_outliers extra segments
/// "outlier_<n>" point in uniformly random directions, redrawn until the
/// cosine distance to every speaker segment exceeds the largest edge of the
/// speaker segments' minimum spanning tree. Throws kSeparationInfeasible when
/// rejection sampling gives up.
SynthEmbeddings gen_embeddings(const SynthSpec& spec,
                               const std::map<std::string, std::string>& speaker_of);

/// segment -> speaker for every reference utterance of the corpus.
std::map<std::string, std::string> corpus_speaker_map(const std::vector<Session>& refs);

/// `n_speakers` speakers with `per_speaker` segments each ("s<i>_<j>").
std::map<std::string, std::string> uniform_speaker_map(std::size_t n_speakers,
                                                       std::size_t per_speaker);

std::string spec_to_json(const SynthSpec& spec);
/// Missing keys keep defaults; unknown keys throw kParse.
SynthSpec spec_from_json(std::string_view text);
std::string truth_to_json(const CorpusTruth& truth);

}  // namespace glsc

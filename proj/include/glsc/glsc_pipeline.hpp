#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glsc/clustering.hpp"
#include "glsc/embedding_store.hpp"
#include "glsc/text_metrics.hpp"
#include "glsc/transcript.hpp"

namespace glsc {

/// Single-speaker, non-overlapping speech segment.
struct SegmentRecord {
  std::string segment_id;
  std::string session_id;
  std::string speaker_id;
  double start = 0.0;
  double end = 0.0;
  std::string ref_text;
  std::optional<std::string> hyp_text;
};

/// Identifier of the utterance at position `index` (chronological order) in a
/// session of `count` utterances: session_id + "_" + index zero-padded to
/// max(4, digits(count - 1)).
std::string segment_id_for(std::string_view session_id, std::size_t index, std::size_t count);

/// Segment id of every utterance, in the session's input order.
std::vector<std::string> utterance_ids(const Session& session);

/// Utterances whose half-open interval intersects no other utterance of the
/// session, in chronological order.
std::vector<SegmentRecord> extract_segments(const Session& session);

struct QualityThresholds {
  double max_wer = 0.30;
  std::int64_t max_insertions = 2;
};

struct FilterDecision {
  bool keep = true;
  bool wer_exceeded = false;
  bool insertions_exceeded = false;
  AlignmentStats stats;

  // "keep", "wer", "insertions" or "wer+insertions".
  std::string reason() const;
};

/// Discards iff wer > max_wer or insertions > max_insertions (both strict).
FilterDecision quality_decision(const AlignmentStats& stats, const QualityThresholds& thresholds);

/// Aligns ref_text against hyp_text; throws kMissingHypothesis without a hypothesis.
FilterDecision quality_filter(const SegmentRecord& segment, const QualityThresholds& thresholds,
                              TokenMode mode);

struct GlscLabel {
  int global_id = 0;
  int local_id = 0;

  friend bool operator==(const GlscLabel&, const GlscLabel&) = default;
  friend auto operator<=>(const GlscLabel&, const GlscLabel&) = default;
};

struct GlobalLabels {
  std::map<std::string, int> by_segment;
  std::size_t noise_dropped = 0;
};

/// Canonical cluster id as L_g; noise segments are dropped and counted.
GlobalLabels assign_global_labels(const ClusterAssignment& assignment);

/// Within each cluster, distinct speakers are numbered 0, 1, ... in order of
/// first appearance in canonical segment order. Noise segments are skipped.
std::map<std::string, int> assign_local_labels(const ClusterAssignment& assignment,
                                               const std::map<std::string, std::string>& speaker_of);

/// "G{g}-L{u}".
std::string compose_label(GlscLabel label);
/// Inverse of compose_label; throws kMalformedLabel.
GlscLabel parse_label(std::string_view text);

struct TurnGroup {
  std::string session_id;
  std::vector<Utterance> utterances;
  std::vector<std::string> utterance_ids;
  double start = 0.0;
  double end = 0.0;
};

/// Merges consecutive turns (chronological order) while the next start is no
/// later than the group end plus gap_tolerance and the grown group stays
/// within max_duration. Every utterance lands in exactly one group.
std::vector<TurnGroup> turn_group_segmentation(const Session& session, double gap_tolerance = 0.0,
                                               double max_duration = 30.0);

enum class ClusterAlgorithm { kHdbscan, kKmeans };

struct PipelineParams {
  QualityThresholds quality;
  TokenMode mode = TokenMode::kAuto;
  ClusterAlgorithm algorithm = ClusterAlgorithm::kHdbscan;
  HdbscanParams hdbscan;
  KmeansParams kmeans;
  double merge_threshold = 0.75;
  unsigned threads = 1;
};

/// Per-stage accounting. input_utterances = dropped_overlap + dropped_quality
/// + dropped_noise + labeled.
struct PipelineReport {
  std::size_t input_utterances = 0;
  std::size_t dropped_overlap = 0;
  std::size_t segments = 0;
  std::size_t dropped_quality = 0;
  std::size_t dropped_wer = 0;         // wer rule fired (possibly with insertions)
  std::size_t dropped_insertions = 0;  // insertion rule fired (possibly with wer)
  std::size_t kept_after_filter = 0;
  std::size_t clusters_discovered = 0;
  std::size_t merges = 0;
  std::size_t clusters_after_merge = 0;
  std::size_t dropped_noise = 0;
  std::size_t labeled = 0;
  std::size_t speakers = 0;
  std::vector<std::string> split_speakers;
};

struct LabeledSegment {
  SegmentRecord segment;
  GlscLabel label;
};

struct GlscDataset {
  std::vector<LabeledSegment> segments;  // sorted by segment_id
  PipelineReport report;
};

/// extract_segments -> quality_filter -> clustering -> merge_clusters ->
/// global and local labels. `hyps` maps segment_id to ASR text. Throws
/// kMissingHypothesis / kMissingEmbedding for kept segments lacking either.
GlscDataset build_glsc_dataset(const std::vector<Session>& sessions, const EmbeddingStore& store,
                               const std::map<std::string, std::string>& hyps,
                               const PipelineParams& params);

/// `segment_id speaker_id L_g L_u composite` rows, sorted by segment_id.
std::string render_labels_tsv(const GlscDataset& dataset);
std::string render_report_json(const PipelineReport& report);

struct LabelRow {
  std::string segment_id;
  std::string speaker_id;
  GlscLabel label;
};

/// Parses render_labels_tsv output; throws kParse / kMalformedLabel.
std::vector<LabelRow> parse_labels_tsv(std::string_view text);

}  // namespace glsc

#include "glsc/glsc_pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <set>

#include "json.hpp"

#include "glsc/error.hpp"
#include "glsc/io.hpp"

namespace glsc {

namespace {

int parse_label_number(std::string_view digits, std::string_view whole) {
  // No sign, no padding, must fit in int.
  const bool all_digits =
      std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (!all_digits || digits.empty() || digits.size() > 9 || (digits.size() > 1 && digits.front() == '0')) {
    throw Error(ErrorCode::kMalformedLabel, "malformed label '" + std::string(whole) + "'");
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw Error(ErrorCode::kMalformedLabel, "malformed label '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

std::string segment_id_for(std::string_view session_id, std::size_t index, std::size_t count) {
  const std::size_t digits = count <= 1 ? 1 : std::to_string(count - 1).size();
  return fmt::format("{}_{:0{}}", session_id, index, std::max<std::size_t>(4, digits));
}

std::vector<std::string> utterance_ids(const Session& session) {
  const auto order = chronological_order(session.utterances);
  std::vector<std::string> ids(order.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    ids[order[rank]] = segment_id_for(session.session_id, rank, order.size());
  }
  return ids;
}

std::vector<SegmentRecord> extract_segments(const Session& session) {
  const auto& utts = session.utterances;
  const auto order = chronological_order(utts);
  std::vector<bool> overlapped(order.size(), false);
  // Sorted by start: only later items starting before this one's end can intersect it.
  for (std::size_t x = 0; x < order.size(); ++x) {
    const auto& a = utts[order[x]];
    for (std::size_t y = x + 1; y < order.size(); ++y) {
      const auto& b = utts[order[y]];
      if (!(b.start < a.end)) break;
      if (a.start < b.end) {
        overlapped[x] = true;
        overlapped[y] = true;
      }
    }
  }
  std::vector<SegmentRecord> out;
  for (std::size_t x = 0; x < order.size(); ++x) {
    if (overlapped[x]) continue;
    const auto& u = utts[order[x]];
    out.push_back(SegmentRecord{segment_id_for(session.session_id, x, order.size()),
                                session.session_id, u.speaker_id, u.start, u.end, u.text,
                                std::nullopt});
  }
  return out;
}

std::string FilterDecision::reason() const {
  if (wer_exceeded && insertions_exceeded) return "wer+insertions";
  if (wer_exceeded) return "wer";
  if (insertions_exceeded) return "insertions";
  return "keep";
}

FilterDecision quality_decision(const AlignmentStats& stats, const QualityThresholds& thresholds) {
  FilterDecision d;
  d.stats = stats;
  d.wer_exceeded = wer(stats) > thresholds.max_wer;
  d.insertions_exceeded = stats.insertions > thresholds.max_insertions;
  d.keep = !d.wer_exceeded && !d.insertions_exceeded;
  return d;
}

FilterDecision quality_filter(const SegmentRecord& segment, const QualityThresholds& thresholds,
                              TokenMode mode) {
  if (!segment.hyp_text) {
    throw Error(ErrorCode::kMissingHypothesis,
                "no ASR hypothesis for segment '" + segment.segment_id + "'");
  }
  return quality_decision(align(tokenize(segment.ref_text, mode), tokenize(*segment.hyp_text, mode)),
                          thresholds);
}

GlobalLabels assign_global_labels(const ClusterAssignment& assignment) {
  const auto canonical = canonicalize(assignment);
  GlobalLabels out;
  for (std::size_t i = 0; i < canonical.segment_ids.size(); ++i) {
    if (canonical.labels[i] == kNoise) {
      ++out.noise_dropped;
      continue;
    }
    out.by_segment.emplace(canonical.segment_ids[i], canonical.labels[i]);
  }
  if (out.noise_dropped > 0) {
    spdlog::info("dropped {} noise segments from global labels", out.noise_dropped);
  }
  return out;
}

std::map<std::string, int> assign_local_labels(const ClusterAssignment& assignment,
                                               const std::map<std::string, std::string>& speaker_of) {
  const auto canonical = canonicalize(assignment);
  std::map<int, std::map<std::string, int>> local_of_cluster;
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < canonical.segment_ids.size(); ++i) {
    if (canonical.labels[i] == kNoise) continue;
    const auto& seg = canonical.segment_ids[i];
    auto spk = speaker_of.find(seg);
    if (spk == speaker_of.end()) {
      throw Error(ErrorCode::kInvalidArgument, "no speaker for segment '" + seg + "'");
    }
    auto& locals = local_of_cluster[canonical.labels[i]];
    auto [it, inserted] = locals.try_emplace(spk->second, static_cast<int>(locals.size()));
    out.emplace(seg, it->second);
  }
  return out;
}

std::string compose_label(GlscLabel label) {
  return fmt::format("G{}-L{}", label.global_id, label.local_id);
}

GlscLabel parse_label(std::string_view text) {
  const auto dash = text.find("-L");
  if (text.size() < 4 || text.front() != 'G' || dash == std::string_view::npos) {
    throw Error(ErrorCode::kMalformedLabel, "malformed label '" + std::string(text) + "'");
  }
  return GlscLabel{parse_label_number(text.substr(1, dash - 1), text),
                   parse_label_number(text.substr(dash + 2), text)};
}

std::vector<TurnGroup> turn_group_segmentation(const Session& session, double gap_tolerance,
                                               double max_duration) {
  if (gap_tolerance < 0.0 || max_duration <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "gap tolerance must be >= 0 and max duration > 0");
  }
  const auto order = chronological_order(session.utterances);
  const auto ids = utterance_ids(session);
  std::vector<TurnGroup> groups;
  for (std::size_t idx : order) {
    const auto& u = session.utterances[idx];
    if (!groups.empty()) {
      auto& g = groups.back();
      const double grown_end = std::max(g.end, u.end);
      if (u.start <= g.end + gap_tolerance && grown_end - g.start <= max_duration) {
        g.utterances.push_back(u);
        g.utterance_ids.push_back(ids[idx]);
        g.end = grown_end;
        continue;
      }
    }
    groups.push_back(TurnGroup{session.session_id, {u}, {ids[idx]}, u.start, u.end});
  }
  return groups;
}

GlscDataset build_glsc_dataset(const std::vector<Session>& sessions, const EmbeddingStore& store,
                               const std::map<std::string, std::string>& hyps,
                               const PipelineParams& params) {
  GlscDataset dataset;
  auto& report = dataset.report;

  std::vector<SegmentRecord> kept;
  for (const auto& session : sessions) {
    report.input_utterances += session.utterances.size();
    auto segments = extract_segments(session);
    report.dropped_overlap += session.utterances.size() - segments.size();
    report.segments += segments.size();
    for (auto& seg : segments) {
      if (auto it = hyps.find(seg.segment_id); it != hyps.end()) seg.hyp_text = it->second;
      const auto decision = quality_filter(seg, params.quality, params.mode);
      if (!decision.keep) {
        ++report.dropped_quality;
        if (decision.wer_exceeded) ++report.dropped_wer;
        if (decision.insertions_exceeded) ++report.dropped_insertions;
        continue;
      }
      kept.push_back(std::move(seg));
    }
  }
  report.kept_after_filter = kept.size();
  spdlog::info("segments: {} input, {} overlapping, {} failed quality filter, {} kept",
               report.input_utterances, report.dropped_overlap, report.dropped_quality, kept.size());
  if (kept.empty()) return dataset;

  std::vector<std::size_t> rows;
  rows.reserve(kept.size());
  std::map<std::string, std::string> speaker_of;
  for (const auto& seg : kept) {
    const auto row = store.find(seg.segment_id);
    if (!row) {
      throw Error(ErrorCode::kMissingEmbedding, "no embedding for kept segment '" + seg.segment_id + "'");
    }
    rows.push_back(*row);
    speaker_of.emplace(seg.segment_id, seg.speaker_id);
  }
  const EmbeddingStore kept_store = store.subset(rows);

  ClusterAssignment clusters;
  if (params.algorithm == ClusterAlgorithm::kHdbscan) {
    clusters = hdbscan(kept_store, params.hdbscan, params.threads);
  } else {
    clusters = kmeans(kept_store, params.kmeans, params.threads);
  }
  report.clusters_discovered = static_cast<std::size_t>(clusters.cluster_count());
  const auto merged = merge_clusters(clusters, kept_store, params.merge_threshold);
  report.merges = merged.merges;
  report.clusters_after_merge = static_cast<std::size_t>(merged.assignment.cluster_count());

  const auto global = assign_global_labels(merged.assignment);
  const auto local = assign_local_labels(merged.assignment, speaker_of);
  report.dropped_noise = global.noise_dropped;

  std::sort(kept.begin(), kept.end(),
            [](const SegmentRecord& a, const SegmentRecord& b) { return a.segment_id < b.segment_id; });
  std::map<std::string, std::set<int>> clusters_of_speaker;
  for (auto& seg : kept) {
    auto g = global.by_segment.find(seg.segment_id);
    if (g == global.by_segment.end()) continue;
    const GlscLabel label{g->second, local.at(seg.segment_id)};
    clusters_of_speaker[seg.speaker_id].insert(label.global_id);
    dataset.segments.push_back(LabeledSegment{std::move(seg), label});
  }
  report.labeled = dataset.segments.size();
  report.speakers = clusters_of_speaker.size();
  for (const auto& [spk, ids] : clusters_of_speaker) {
    if (ids.size() > 1) report.split_speakers.push_back(spk);
  }
  spdlog::info("clusters: {} discovered, {} merges, {} final; {} noise, {} labeled, {} split speakers",
               report.clusters_discovered, report.merges, report.clusters_after_merge,
               report.dropped_noise, report.labeled, report.split_speakers.size());
  return dataset;
}

std::string render_labels_tsv(const GlscDataset& dataset) {
  std::string out;
  for (const auto& ls : dataset.segments) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", ls.segment.segment_id, ls.segment.speaker_id,
                       ls.label.global_id, ls.label.local_id, compose_label(ls.label));
  }
  return out;
}

std::string render_report_json(const PipelineReport& report) {
  nlohmann::ordered_json doc;
  doc["input_utterances"] = report.input_utterances;
  doc["stages"] = nlohmann::ordered_json::array({
      {{"stage", "extract_segments"}, {"kept", report.segments}, {"dropped", report.dropped_overlap}},
      {{"stage", "quality_filter"},
       {"kept", report.kept_after_filter},
       {"dropped", report.dropped_quality},
       {"dropped_wer", report.dropped_wer},
       {"dropped_insertions", report.dropped_insertions}},
      {{"stage", "noise_filter"}, {"kept", report.labeled}, {"dropped", report.dropped_noise}},
  });
  doc["clusters_discovered"] = report.clusters_discovered;
  doc["merges"] = report.merges;
  doc["clusters_after_merge"] = report.clusters_after_merge;
  doc["labeled"] = report.labeled;
  doc["speakers"] = report.speakers;
  doc["split_speakers"] = report.split_speakers;
  return doc.dump(2) + "\n";
}

std::vector<LabelRow> parse_labels_tsv(std::string_view text) {
  std::vector<LabelRow> rows;
  for (const auto& [line_no, line] : io::data_lines(text)) {
    const auto f = io::split(line, '\t');
    if (f.size() != 5) {
      throw Error(ErrorCode::kParse, "labels line " + std::to_string(line_no) + ": expected 5 fields");
    }
    LabelRow row{std::string(f[0]), std::string(f[1]), parse_label(f[4])};
    if (std::to_string(row.label.global_id) != f[2] || std::to_string(row.label.local_id) != f[3]) {
      throw Error(ErrorCode::kParse,
                  "labels line " + std::to_string(line_no) + ": composite disagrees with L_g/L_u");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace glsc

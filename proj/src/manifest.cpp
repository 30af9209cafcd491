#include "glsc/manifest.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>
#include <utility>

#include "glsc/error.hpp"
#include "glsc/io.hpp"
#include "glsc/random.hpp"

namespace glsc {

double combine_loss(const JointLossSpec& spec, double l_glsc, double l_sdr) {
  if (!std::isfinite(spec.alpha) || spec.alpha < 0.0 || spec.alpha > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("alpha {} outside [0, 1]", spec.alpha));
  }
  if (!std::isfinite(l_glsc) || !std::isfinite(l_sdr)) {
    throw Error(ErrorCode::kNonFinite, "loss values must be finite");
  }
  if (l_glsc < 0.0 || l_sdr < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "loss values must be non-negative");
  }
  return spec.alpha * l_glsc + (1.0 - spec.alpha) * l_sdr;
}

Manifest build_manifest(const std::vector<TurnGroup>& sdr_groups,
                        const std::vector<LabeledSegment>& glsc_segments, std::uint64_t seed,
                        double resolution) {
  Manifest manifest;
  auto& entries = manifest.entries;
  entries.reserve(sdr_groups.size() + glsc_segments.size());
  for (const auto& group : sdr_groups) {
    std::string source = "group:" + group.utterance_ids.front();
    if (group.utterance_ids.size() > 1) source += ".." + group.utterance_ids.back();
    entries.push_back(ManifestEntry{SotTask::kSdr, group.session_id, group.start, group.end,
                                    serialize_sdr(group, resolution), std::move(source)});
  }
  for (const auto& ls : glsc_segments) {
    const auto& seg = ls.segment;
    entries.push_back(ManifestEntry{SotTask::kGlsc, seg.session_id, seg.start, seg.end,
                                    serialize_glsc(seg, ls.label), "segment:" + seg.segment_id});
  }
  manifest.sdr_count = sdr_groups.size();
  manifest.glsc_count = glsc_segments.size();

  std::mt19937_64 gen(seed);
  for (std::size_t i = entries.size(); i > 1; --i) {
    std::swap(entries[i - 1], entries[rng::uniform_index(gen, i)]);
  }
  return manifest;
}

std::string render_manifest_tsv(const Manifest& manifest, const JointLossSpec& spec) {
  std::string out = "#alpha=" + io::format_seconds(spec.alpha) + "\n";
  for (const auto& e : manifest.entries) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", e.task == SotTask::kSdr ? "SDR" : "GLSC",
                       e.session_id, io::format_seconds(e.start), io::format_seconds(e.end),
                       e.target, e.source);
  }
  return out;
}

}  // namespace glsc

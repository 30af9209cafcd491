#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "glsc/glsc_pipeline.hpp"
#include "glsc/sot_format.hpp"

namespace glsc {

/// Weight of the GLSC loss against the SDR loss. Not calibrated; 0.5 is only
/// a neutral default.
struct JointLossSpec {
  double alpha = 0.5;
};

/// alpha * l_glsc + (1 - alpha) * l_sdr. Throws kNonFinite for non-finite
/// losses and kInvalidArgument for negative losses or alpha outside [0, 1].
double combine_loss(const JointLossSpec& spec, double l_glsc, double l_sdr);

struct ManifestEntry {
  SotTask task = SotTask::kSdr;
  std::string session_id;
  double start = 0.0;
  double end = 0.0;
  std::string target;
  std::string source;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::size_t sdr_count = 0;
  std::size_t glsc_count = 0;
};

/// One SDR entry per turn group and one GLSC entry per labeled segment,
/// shuffled by a Fisher-Yates pass driven by `seed`.
Manifest build_manifest(const std::vector<TurnGroup>& sdr_groups,
                        const std::vector<LabeledSegment>& glsc_segments, std::uint64_t seed,
                        double resolution = kDefaultResolution);

/// `#alpha=<value>` header, then `task session_id start end target source` rows.
std::string render_manifest_tsv(const Manifest& manifest, const JointLossSpec& spec);

}  // namespace glsc

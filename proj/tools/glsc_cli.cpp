// glsc: evaluation, label construction, segmentation, manifests and synthetic data.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "glsc/error.hpp"
#include "glsc/glsc_pipeline.hpp"
#include "glsc/io.hpp"
#include "glsc/manifest.hpp"
#include "glsc/perm_metrics.hpp"
#include "glsc/sot_format.hpp"
#include "glsc/synth_oracle.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int {
  kOk = 0,
  kIoOrParse = 1,
  kPairing = 2,
  kOracleMismatch = 3,
  kMissingEmbeddings = 4,
  kInfeasibleSpec = 5,
  kUsage = 64,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(glsc::ErrorCode code) {
  using glsc::ErrorCode;
  switch (code) {
    case ErrorCode::kUnpairedSession:
      return kPairing;
    case ErrorCode::kMissingEmbedding:
      return kMissingEmbeddings;
    case ErrorCode::kSeparationInfeasible:
      return kInfeasibleSpec;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kKTooLarge:
      return kUsage;
    default:
      return kIoOrParse;
  }
}

struct Global {
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string log_level = "warn";
};

void setup_logging(const Global& g) {
  auto logger = spdlog::stderr_color_mt("glsc");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  std::string level = g.log_level;
  if (const char* env = std::getenv("GLSC_LOG"); env != nullptr && *env != '\0') level = env;
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") {
    throw UsageError("unknown log level '" + level + "'");
  }
  spdlog::set_level(parsed);
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    glsc::io::write_file(path, content);
  }
}

// `session_id<TAB>group_start<TAB>sequence` rows; one session per id.
std::vector<glsc::Session> parse_sot_sessions(std::string_view text, bool lenient) {
  std::vector<glsc::Session> sessions;
  std::map<std::string, std::size_t> index;
  for (const auto& [line_no, line] : glsc::io::data_lines(text)) {
    const auto f = glsc::io::split(line, '\t');
    if (f.size() != 3) {
      throw glsc::Error(glsc::ErrorCode::kParse,
                        fmt::format("line {}: expected session_id<TAB>group_start<TAB>sequence", line_no));
    }
    const std::string session_id(f[0]);
    const double offset = glsc::io::parse_seconds(f[1], line_no);
    glsc::SotParseResult parsed;
    try {
      parsed = glsc::parse_sot(f[2], lenient);
    } catch (const glsc::ParseError& e) {
      throw glsc::Error(glsc::ErrorCode::kParse, fmt::format("line {}: {}", line_no, e.what()));
    }
    for (const auto& d : parsed.diagnostics) {
      spdlog::warn("line {} byte {}: {}", line_no, d.offset, d.message);
    }
    if (parsed.sequence.task != glsc::SotTask::kSdr) {
      throw glsc::Error(glsc::ErrorCode::kParse, fmt::format("line {}: not an SDR sequence", line_no));
    }
    auto [it, inserted] = index.try_emplace(session_id, sessions.size());
    if (inserted) sessions.push_back(glsc::Session{session_id, {}});
    for (auto& u : glsc::sot_utterances(parsed.sequence, session_id, offset)) {
      sessions[it->second].utterances.push_back(std::move(u));
    }
  }
  return sessions;
}

std::vector<glsc::Session> load_sessions(const std::string& path, const std::string& format, bool lenient) {
  const auto text = glsc::io::read_file(path);
  return format == "sot" ? parse_sot_sessions(text, lenient) : glsc::io::parse_sessions_tsv(text);
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string ref;
  std::string hyp;
  std::string mode = "auto";
  std::string format = "tsv";
  std::string out;
  std::string table;
  bool oracle_check = false;
};

int run_evaluate(const EvaluateArgs& a, const Global& g) {
  const auto mode = glsc::parse_token_mode(a.mode);
  const auto refs = load_sessions(a.ref, a.format, false);
  const auto hyps = load_sessions(a.hyp, a.format, true);
  const auto report = glsc::evaluate_corpus(refs, hyps, mode, g.threads);

  if (a.oracle_check) {
    std::size_t checked = 0;
    for (const auto& pair : glsc::pair_sessions(refs, hyps)) {
      if (std::max(glsc::distinct_speakers(*pair.ref), glsc::distinct_speakers(*pair.hyp)) > 6) continue;
      const auto fast = glsc::cpwer(*pair.ref, *pair.hyp, mode, glsc::CpwerSolver::kAssignment);
      const auto slow = glsc::cpwer(*pair.ref, *pair.hyp, mode, glsc::CpwerSolver::kExhaustive);
      if (fast.errors != slow.errors || fast.ref_len != slow.ref_len) {
        throw OracleMismatch(fmt::format("session {}: assignment cpWER errors {} vs exhaustive {}",
                                         pair.ref->session_id, fast.errors, slow.errors));
      }
      ++checked;
    }
    spdlog::info("oracle check passed on {} sessions", checked);
  }

  emit(a.table, glsc::render_table(report));
  if (!a.out.empty()) emit(a.out, glsc::render_json(report));
  return kOk;
}

// ---- build-labels ----

struct BuildArgs {
  std::string segments;
  std::string hyps;
  std::string embeddings;
  std::string algorithm = "hdbscan";
  std::optional<std::size_t> clusters;
  std::size_t min_cluster_size = 5;
  std::size_t min_samples = 5;
  double merge_threshold = 0.75;
  double max_wer = 0.30;
  std::int64_t max_insertions = 2;
  std::string mode = "auto";
  bool no_normalize = false;
  std::string out_labels;
  std::string out_report;
};

int run_build_labels(const BuildArgs& a, const Global& g) {
  glsc::PipelineParams params;
  params.quality = {a.max_wer, a.max_insertions};
  params.mode = glsc::parse_token_mode(a.mode);
  params.merge_threshold = a.merge_threshold;
  params.threads = g.threads;
  if (a.algorithm == "kmeans") {
    if (!a.clusters) throw UsageError("--algorithm kmeans requires --clusters");
    params.algorithm = glsc::ClusterAlgorithm::kKmeans;
    params.kmeans.k = *a.clusters;
    params.kmeans.seed = g.seed;
  } else {
    params.algorithm = glsc::ClusterAlgorithm::kHdbscan;
    params.hdbscan.min_cluster_size = a.min_cluster_size;
    params.hdbscan.min_samples = a.min_samples;
  }

  const auto sessions = glsc::io::parse_sessions_tsv(glsc::io::read_file(a.segments));
  const auto hyps = glsc::io::parse_hyps_tsv(glsc::io::read_file(a.hyps));
  const auto store = glsc::load_embeddings_file(a.embeddings, glsc::EmbeddingLoadOptions{!a.no_normalize});
  const auto dataset = glsc::build_glsc_dataset(sessions, store, hyps, params);

  emit(a.out_labels, glsc::render_labels_tsv(dataset));
  if (!a.out_report.empty()) emit(a.out_report, glsc::render_report_json(dataset.report));
  return kOk;
}

// ---- segment ----

struct SegmentArgs {
  std::string segments;
  double gap_tolerance = 0.0;
  double max_duration = 30.0;
  std::string out;
};

std::vector<glsc::TurnGroup> all_groups(const std::vector<glsc::Session>& sessions, double gap, double max_dur) {
  std::vector<glsc::TurnGroup> groups;
  for (const auto& s : sessions) {
    for (auto& grp : glsc::turn_group_segmentation(s, gap, max_dur)) groups.push_back(std::move(grp));
  }
  return groups;
}

void check_segmentation_args(double gap, double max_dur) {
  if (!(gap >= 0.0)) throw UsageError("--gap-tolerance must be >= 0");
  if (!(max_dur > 0.0)) throw UsageError("--max-duration must be > 0");
}

int run_segment(const SegmentArgs& a) {
  check_segmentation_args(a.gap_tolerance, a.max_duration);
  const auto sessions = glsc::io::parse_sessions_tsv(glsc::io::read_file(a.segments));
  std::string out;
  std::map<std::string, std::size_t> per_session;
  for (const auto& grp : all_groups(sessions, a.gap_tolerance, a.max_duration)) {
    std::string ids;
    for (const auto& id : grp.utterance_ids) ids += (ids.empty() ? "" : ",") + id;
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", grp.session_id, per_session[grp.session_id]++,
                       glsc::io::format_seconds(grp.start), glsc::io::format_seconds(grp.end), ids);
  }
  emit(a.out, out);
  return kOk;
}

// ---- manifest ----

struct ManifestArgs {
  std::string segments;
  std::string labels;
  double alpha = 0.5;
  double gap_tolerance = 0.0;
  double max_duration = 30.0;
  double resolution = glsc::kDefaultResolution;
  std::string out;
};

int run_manifest(const ManifestArgs& a, const Global& g) {
  if (!(a.alpha >= 0.0 && a.alpha <= 1.0)) throw UsageError("--alpha must lie in [0, 1]");
  if (!(a.resolution > 0.0)) throw UsageError("--resolution must be > 0");
  check_segmentation_args(a.gap_tolerance, a.max_duration);

  const auto sessions = glsc::io::parse_sessions_tsv(glsc::io::read_file(a.segments));
  const auto rows = glsc::parse_labels_tsv(glsc::io::read_file(a.labels));

  std::map<std::string, glsc::SegmentRecord> by_id;
  for (const auto& s : sessions) {
    for (auto& seg : glsc::extract_segments(s)) by_id.emplace(seg.segment_id, std::move(seg));
  }
  std::vector<glsc::LabeledSegment> labeled;
  for (const auto& row : rows) {
    auto it = by_id.find(row.segment_id);
    if (it == by_id.end() || it->second.speaker_id != row.speaker_id) {
      throw glsc::Error(glsc::ErrorCode::kParse,
                        "label for '" + row.segment_id + "' matches no segment of that speaker");
    }
    labeled.push_back(glsc::LabeledSegment{it->second, row.label});
  }

  const auto groups = all_groups(sessions, a.gap_tolerance, a.max_duration);
  const auto manifest = glsc::build_manifest(groups, labeled, g.seed, a.resolution);
  spdlog::info("manifest: {} SDR entries, {} GLSC entries", manifest.sdr_count, manifest.glsc_count);
  emit(a.out, glsc::render_manifest_tsv(manifest, glsc::JointLossSpec{a.alpha}));
  return kOk;
}

// ---- synth ----

struct SynthArgs {
  std::string spec;
  std::string out_dir;
  std::optional<std::size_t> speakers, sessions, vocab, dim, outliers;
  std::optional<double> sub, del, ins, attribution, sigma, min_angle, common;
};

int run_synth(const SynthArgs& a, const Global& g, bool seed_given) {
  glsc::SynthSpec spec;
  if (!a.spec.empty()) spec = glsc::spec_from_json(glsc::io::read_file(a.spec));
  if (seed_given) spec.seed = g.seed;
  if (a.speakers) {
    spec.n_speakers = *a.speakers;
    spec.speakers_per_session.hi = std::min(spec.speakers_per_session.hi, spec.n_speakers);
    spec.speakers_per_session.lo = std::min(spec.speakers_per_session.lo, spec.speakers_per_session.hi);
  }
  if (a.sessions) spec.n_sessions = *a.sessions;
  if (a.vocab) spec.vocab_size = *a.vocab;
  if (a.dim) spec.embedding_dim = *a.dim;
  if (a.outliers) spec.n_outliers = *a.outliers;
  if (a.sub) spec.sub_rate = *a.sub;
  if (a.del) spec.del_rate = *a.del;
  if (a.ins) spec.ins_rate = *a.ins;
  if (a.attribution) spec.attribution_error_rate = *a.attribution;
  if (a.sigma) spec.intra_speaker_sigma = *a.sigma;
  if (a.min_angle) spec.inter_speaker_min_angle = *a.min_angle;
  if (a.common) spec.common_direction_weight = *a.common;

  const auto corpus = glsc::gen_corpus(spec);
  const auto emb = glsc::gen_embeddings(spec, glsc::corpus_speaker_map(corpus.refs));

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw glsc::Error(glsc::ErrorCode::kIo, "cannot create '" + a.out_dir + "': " + ec.message());
  const fs::path dir(a.out_dir);

  glsc::io::write_file((dir / "spec.json").string(), glsc::spec_to_json(spec));
  glsc::io::write_file((dir / "ref.tsv").string(), glsc::io::render_sessions_tsv(corpus.refs));
  glsc::io::write_file((dir / "hyp.tsv").string(), glsc::io::render_sessions_tsv(corpus.hyps));
  std::string hyps;
  for (const auto& [id, text] : corpus.segment_hyps) hyps += id + '\t' + text + '\n';
  glsc::io::write_file((dir / "hyps.tsv").string(), hyps);
  std::ostringstream bin;
  glsc::save_embeddings(emb.store, bin, glsc::EmbeddingFormat::kBinary);
  glsc::io::write_file((dir / "embeddings.bin").string(), bin.str());
  glsc::io::write_file((dir / "truth.json").string(), glsc::truth_to_json(corpus.truth));
  spdlog::info("synth: {} sessions, {} reference tokens, {} errors, {} reassignments",
               corpus.refs.size(), corpus.truth.ref_len, corpus.truth.errors(), corpus.truth.reassignments);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GLSC speaker-label and SDR evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--threads", g.threads, "Worker threads")->default_val(1)->check(CLI::Range(1u, 1024u));
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed")->default_val(0);
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off (GLSC_LOG overrides)")
      ->default_val("warn");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score hypotheses: WER, cpWER, delta-cp, SCA");
  evaluate->add_option("--ref", ev.ref, "Reference sessions")->required();
  evaluate->add_option("--hyp", ev.hyp, "Hypothesis sessions")->required();
  evaluate->add_option("--mode", ev.mode, "Tokenization")->check(CLI::IsMember({"word", "char", "auto"}))
      ->default_val("auto");
  evaluate->add_option("--format", ev.format, "Input format")->check(CLI::IsMember({"tsv", "sot"}))
      ->default_val("tsv");
  evaluate->add_option("--out", ev.out, "Machine-readable report (JSON)");
  evaluate->add_option("--table", ev.table, "Human-readable table (default stdout)");
  evaluate->add_flag("--oracle-check", ev.oracle_check, "Cross-check cpWER by exhaustive search");

  BuildArgs bl;
  auto* build = app.add_subcommand("build-labels", "Filter, cluster and label segments");
  build->add_option("--segments", bl.segments, "Segments TSV")->required();
  build->add_option("--hyps", bl.hyps, "ASR hypotheses TSV")->required();
  build->add_option("--embeddings", bl.embeddings, "Speaker embeddings (text or binary)")->required();
  build->add_option("--algorithm", bl.algorithm, "Clustering")->check(CLI::IsMember({"hdbscan", "kmeans"}))
      ->default_val("hdbscan");
  build->add_option("--clusters", bl.clusters, "k for kmeans");
  build->add_option("--min-cluster-size", bl.min_cluster_size, "HDBSCAN min cluster size")->default_val(5);
  build->add_option("--min-samples", bl.min_samples, "HDBSCAN neighbourhood size")->default_val(5);
  build->add_option("--merge-threshold", bl.merge_threshold, "Centroid cosine merge threshold")
      ->default_val(0.75);
  build->add_option("--max-wer", bl.max_wer, "Discard segments above this WER")->default_val(0.30);
  build->add_option("--max-insertions", bl.max_insertions, "Discard segments above this insertion count")
      ->default_val(2);
  build->add_option("--mode", bl.mode, "Tokenization")->check(CLI::IsMember({"word", "char", "auto"}))
      ->default_val("auto");
  build->add_flag("--no-normalize", bl.no_normalize, "Keep embeddings at their stored length");
  build->add_option("--out-labels", bl.out_labels, "Labels TSV")->required();
  build->add_option("--out-report", bl.out_report, "Stage report (JSON)");

  SegmentArgs sg;
  auto* segment = app.add_subcommand("segment", "Group consecutive turns");
  segment->add_option("--segments", sg.segments, "Segments TSV")->required();
  segment->add_option("--gap-tolerance", sg.gap_tolerance, "Seconds")->default_val(0.0);
  segment->add_option("--max-duration", sg.max_duration, "Seconds")->default_val(30.0);
  segment->add_option("--out", sg.out, "Output TSV (default stdout)");

  ManifestArgs mf;
  auto* manifest = app.add_subcommand("manifest", "Mixed SDR/GLSC training manifest");
  manifest->add_option("--segments", mf.segments, "Segments TSV")->required();
  manifest->add_option("--labels", mf.labels, "Labels TSV from build-labels")->required();
  manifest->add_option("--alpha", mf.alpha, "GLSC loss weight (uncalibrated)")->default_val(0.5);
  manifest->add_option("--gap-tolerance", mf.gap_tolerance, "Seconds")->default_val(0.0);
  manifest->add_option("--max-duration", mf.max_duration, "Seconds")->default_val(30.0);
  manifest->add_option("--resolution", mf.resolution, "Timestamp resolution (s)")->default_val(0.1);
  manifest->add_option("--out", mf.out, "Manifest TSV (default stdout)");

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth->add_option("--spec", sy.spec, "Spec JSON");
  synth->add_option("--out-dir", sy.out_dir, "Output directory")->required();
  synth->add_option("--speakers", sy.speakers, "Speaker pool size");
  synth->add_option("--sessions", sy.sessions, "Session count");
  synth->add_option("--vocab", sy.vocab, "Vocabulary size");
  synth->add_option("--dim", sy.dim, "Embedding dimension");
  synth->add_option("--outliers", sy.outliers, "Outlier embeddings");
  synth->add_option("--sub", sy.sub, "Substitution rate");
  synth->add_option("--del", sy.del, "Deletion rate");
  synth->add_option("--ins", sy.ins, "Insertion rate");
  synth->add_option("--attribution", sy.attribution, "Speaker reassignment rate");
  synth->add_option("--sigma", sy.sigma, "Intra-speaker noise");
  synth->add_option("--min-angle", sy.min_angle, "Inter-speaker minimum angle (rad)");
  synth->add_option("--common", sy.common, "Common-direction weight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    setup_logging(g);
    if (*evaluate) return run_evaluate(ev, g);
    if (*build) return run_build_labels(bl, g);
    if (*segment) return run_segment(sg);
    if (*manifest) return run_manifest(mf, g);
    if (*synth) return run_synth(sy, g, seed_opt->count() > 0);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const OracleMismatch& e) {
    std::cerr << "oracle mismatch: " << e.what() << "\n";
    return kOracleMismatch;
  } catch (const glsc::Error& e) {
    std::cerr << glsc::error_code_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kUsage;
}

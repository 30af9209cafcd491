// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "glsc/clustering.hpp"
#include "glsc/embedding_store.hpp"
#include "glsc/error.hpp"
#include "glsc/glsc_pipeline.hpp"
#include "glsc/manifest.hpp"
#include "glsc/perm_metrics.hpp"
#include "glsc/sot_format.hpp"
#include "glsc/synth_oracle.hpp"
#include "glsc/text_metrics.hpp"
#include "support.hpp"

using namespace glsc;

namespace {

// Tolerances and limits.
constexpr double kDeltaCpTolerance = 0.015;        // percentage points
constexpr double kSimilarityTolerance = 1e-9;
constexpr long double kLinearityTolerance = 1e-12L;
constexpr double kInertiaOracleTolerance = 1e-9;   // relative, recomputed inertia
constexpr double kMergeThreshold = 0.75;
constexpr double kMaxWer = 0.30;
constexpr std::int64_t kMaxInsertions = 2;
constexpr int kNoiseSetsRequired = 9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

Outcome fail(std::string detail) { return Outcome{false, std::move(detail)}; }

// ---- 1 ----

struct ReportedRow {
  const char* system;
  const char* corpus;
  double wer, cpwer, delta;
};

const std::vector<ReportedRow> kReportedScores = {
    {"TagSpeech", "AliMeeting", 25.42, 33.84, 8.42},  {"TagSpeech", "AMI", 31.62, 42.55, 10.93},
    {"VibeVoice", "AliMeeting", 27.4, 29.33, 1.93},   {"VibeVoice", "AISHELL-4", 21.4, 24.99, 3.59},
    {"VibeVoice", "AMI", 24.65, 28.82, 4.17},         {"Gemini-2.5", "AliMeeting", 27.43, 41.64, 14.2},
    {"Gemini-2.5", "AISHELL-4", 22.42, 31.59, 9.17},  {"Gemini-2.5", "AMI", 22.35, 34.78, 12.43},
    {"Gemini-3", "AliMeeting", 26.75, 32.84, 6.09},   {"Gemini-3", "AISHELL-4", 22.75, 27.43, 4.68},
    {"Gemini-3", "AMI", 22.09, 26.91, 4.82},          {"Qwen2.5-omni", "AliMeeting", 29.21, 43.64, 14.43},
    {"Qwen2.5-omni", "AISHELL-4", 31.46, 46.28, 14.82}, {"Qwen2.5-omni", "AMI", 32.25, 49.86, 17.61},
    {"Qwen-sft", "AliMeeting", 20.22, 26.77, 6.55},   {"Qwen-sft", "AISHELL-4", 23.83, 26.34, 2.51},
    {"Qwen-sft", "AMI", 20.23, 27.16, 6.93},          {"GLSC-SDR", "AliMeeting", 20.09, 25.43, 5.34},
    {"GLSC-SDR", "AISHELL-4", 21.36, 23.49, 2.13},    {"GLSC-SDR", "AMI", 17.49, 23.32, 5.83},
};

Outcome delta_cp_arithmetic() {
  double worst = 0.0;
  for (const auto& row : kReportedScores) {
    const auto rendered = format_percent(delta_cp(row.cpwer / 100.0, row.wer / 100.0));
    const double got = std::stod(rendered);
    const double err = std::fabs(got - row.delta);
    worst = std::max(worst, err);
    if (err > kDeltaCpTolerance) {
      return fail(fmt::format("{} {}: got {} expected {}", row.system, row.corpus, rendered, row.delta));
    }
  }
  return Outcome{true, fmt::format("{} rows, max |err| {:.4f}", kReportedScores.size(), worst)};
}

// ---- 2 ----

Outcome cpwer_oracle() {
  SynthSpec spec;
  spec.seed = 2024;
  spec.n_speakers = 6;
  spec.n_sessions = 200;
  spec.speakers_per_session = {2, 6};
  spec.utterances_per_session = {6, 14};
  spec.words_per_utterance = {2, 8};
  spec.vocab_size = 20;
  spec.sub_rate = 0.15;
  spec.del_rate = 0.1;
  spec.ins_rate = 0.1;
  spec.attribution_error_rate = 0.3;
  const auto c = gen_corpus(spec);
  std::set<std::size_t> sizes;
  for (std::size_t i = 0; i < c.refs.size(); ++i) {
    sizes.insert(distinct_speakers(c.refs[i]));
    const auto a = cpwer(c.refs[i], c.hyps[i], TokenMode::kWord, CpwerSolver::kAssignment);
    const auto e = cpwer(c.refs[i], c.hyps[i], TokenMode::kWord, CpwerSolver::kExhaustive);
    if (a.errors != e.errors || a.ref_len != e.ref_len) {
      return fail(fmt::format("{}: assignment {} vs exhaustive {}", c.refs[i].session_id, a.errors, e.errors));
    }
  }
  if (sizes != std::set<std::size_t>{2, 3, 4, 5, 6}) return fail("speaker counts 2..6 not all covered");
  return Outcome{true, fmt::format("{} sessions, speaker counts 2-6", c.refs.size())};
}

// ---- 3 ----

Outcome alignment_oracle() {
  std::mt19937_64 gen(3003);
  for (int t = 0; t < 1000; ++t) {
    const auto a = test::random_tokens(gen, 8, 3);
    const auto b = test::random_tokens(gen, 8, 3);
    const auto stats = align(a, b);
    const auto expected = test::brute_edit_distance(a, b);
    if (stats.errors() != expected || stats.ref_len != static_cast<std::int64_t>(a.size()) ||
        stats.correct + stats.substitutions + stats.deletions != stats.ref_len) {
      return fail(fmt::format("pair {}: align {} vs brute force {}", t, stats.errors(), expected));
    }
  }
  return Outcome{true, "1000 pairs, lengths <= 8"};
}

// ---- 4 ----

Outcome quality_boundaries() {
  const QualityThresholds thr{kMaxWer, kMaxInsertions};
  std::string grid;
  for (int wer_pct : {29, 30, 31}) {
    for (std::int64_t ins : {1, 2, 3}) {
      // 100 reference words; the first (wer_pct - ins) are substituted and
      // `ins` extra words are appended.
      std::string ref, hyp;
      for (int i = 0; i < 100; ++i) {
        ref += fmt::format("r{} ", i);
        hyp += i < wer_pct - ins ? fmt::format("s{} ", i) : fmt::format("r{} ", i);
      }
      for (std::int64_t i = 0; i < ins; ++i) hyp += fmt::format("x{} ", i);
      const SegmentRecord seg{"b_0000", "b", "A", 0, 1, ref, hyp};
      const auto d = quality_filter(seg, thr, TokenMode::kWord);
      const bool expect_keep = wer_pct <= 30 && ins <= 2;
      if (d.stats.insertions != ins || d.stats.errors() != wer_pct || d.keep != expect_keep) {
        return fail(fmt::format("wer {}% I={}: keep={} (S={} I={})", wer_pct, ins, d.keep, d.stats.substitutions,
                                d.stats.insertions));
      }
      const bool direct = quality_decision(AlignmentStats{wer_pct - ins, 0, ins, 100 - (wer_pct - ins), 100}, thr).keep;
      if (direct != expect_keep) return fail(fmt::format("decision at wer {}% I={}", wer_pct, ins));
      grid += d.keep ? 'K' : 'D';
    }
    grid += ' ';
  }
  return Outcome{true, "rows wer=.29/.30/.31, cols I=1/2/3: " + grid};
}

// ---- 5 ----

std::vector<long double> oracle_centroid(const EmbeddingStore& store, const std::vector<std::size_t>& members) {
  std::vector<long double> sum(store.dim(), 0.0L);
  for (auto m : members) {
    long double n = 0;
    for (float x : store.vector(m)) n += static_cast<long double>(x) * x;
    n = std::sqrt(n);
    for (std::size_t d = 0; d < store.dim(); ++d) sum[d] += store.vector(m)[d] / n;
  }
  return sum;
}

long double oracle_cos(const std::vector<long double>& a, const std::vector<long double>& b) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

// Two clusters of three points around directions with the requested cosine.
EmbeddingStore constructed_pair(double cos) {
  const double s = std::sqrt(1 - cos * cos);
  std::vector<Embedding> recs;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 3; ++i) {
      // Symmetric jitter in the third axis keeps each centroid on its axis pair.
      const double z = i == 0 ? 0.0 : (i == 1 ? 0.02 : -0.02);
      std::vector<double> v = c == 0 ? std::vector<double>{1, 0, z, 0} : std::vector<double>{cos, s, 0, z};
      recs.push_back({fmt::format("c{}_{}", c, i), "s", test::unit_float(v)});
    }
  }
  return EmbeddingStore::from_records(std::move(recs));
}

Outcome merge_threshold() {
  const ClusterAssignment split{{"c0_0", "c0_1", "c0_2", "c1_0", "c1_1", "c1_2"}, {0, 0, 0, 1, 1, 1}};
  for (double cos : {0.74, 0.76}) {
    const auto store = constructed_pair(cos);
    const std::size_t a[] = {0, 1, 2}, b[] = {3, 4, 5};
    const auto ca = centroid_of(store, a), cb = centroid_of(store, b);
    const double lib = cosine_similarity(std::span<const double>(ca.vector), std::span<const double>(cb.vector));
    const long double oracle = oracle_cos(oracle_centroid(store, {0, 1, 2}), oracle_centroid(store, {3, 4, 5}));
    if (std::fabs(static_cast<long double>(lib) - oracle) > kSimilarityTolerance) {
      return fail(fmt::format("similarity {} vs oracle {}", lib, static_cast<double>(oracle)));
    }
    if (std::fabs(lib - cos) > 1e-3) return fail(fmt::format("constructed cosine {} off target {}", lib, cos));
    const auto merged = merge_clusters(split, store, kMergeThreshold);
    const bool want_merge = cos > kMergeThreshold;
    if ((merged.merges == 1) != want_merge || merged.assignment.cluster_count() != (want_merge ? 1 : 2)) {
      return fail(fmt::format("cosine {}: merges={}", cos, merged.merges));
    }
  }

  // Many random clusterings: no surviving pair above the threshold.
  std::size_t total_merges = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthSpec spec;
    spec.seed = seed;
    spec.embedding_dim = 8;
    spec.intra_speaker_sigma = 0.3;
    spec.inter_speaker_min_angle = 0.3;
    const auto emb = gen_embeddings(spec, uniform_speaker_map(8, 6));
    const auto km = kmeans(emb.store, KmeansParams{12, 300, seed, 1e-6});
    const auto merged = merge_clusters(km, emb.store, kMergeThreshold);
    total_merges += merged.merges;
    const int k = merged.assignment.cluster_count();
    std::vector<std::vector<long double>> cents;
    for (int c = 0; c < k; ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < merged.assignment.labels.size(); ++i) {
        if (merged.assignment.labels[i] == c) members.push_back(*emb.store.find(merged.assignment.segment_ids[i]));
      }
      cents.push_back(oracle_centroid(emb.store, members));
    }
    for (int x = 0; x < k; ++x)
      for (int y = x + 1; y < k; ++y) {
        const long double s = oracle_cos(cents[x], cents[y]);
        if (s > kMergeThreshold + kSimilarityTolerance) {
          return fail(fmt::format("seed {}: clusters {} and {} left at {}", seed, x, y, static_cast<double>(s)));
        }
      }
  }
  if (total_merges == 0) return fail("random clusterings never exercised a merge");
  return Outcome{true, fmt::format("0.74 kept apart, 0.76 merged; {} random merges all end <= 0.75", total_merges)};
}

// ---- 6 ----

Outcome hdbscan_recovery() {
  int noise_ok = 0;
  std::string sizes;
  for (std::uint64_t set = 0; set < 10; ++set) {
    SynthSpec spec;
    spec.seed = 6000 + set;
    spec.n_speakers = 5 + static_cast<std::size_t>(set * 15 / 9);  // 5..20
    spec.embedding_dim = 64;
    spec.intra_speaker_sigma = 0.02;
    spec.inter_speaker_min_angle = 1.2;
    spec.n_outliers = 4;
    const auto emb = gen_embeddings(spec, uniform_speaker_map(spec.n_speakers, 8 + set % 5));
    const auto result = hdbscan(emb.store, HdbscanParams{});
    std::vector<int> truth, predicted;
    bool outliers_noise = true;
    for (std::size_t i = 0; i < emb.store.size(); ++i) {
      const int t = emb.truth.at(emb.store.segment_id(i));
      if (t < 0) {
        outliers_noise = outliers_noise && result.labels[i] == kNoise;
        continue;
      }
      truth.push_back(t);
      predicted.push_back(result.labels[i]);
    }
    const double ari = adjusted_rand_index(predicted, truth);
    if (ari != 1.0) return fail(fmt::format("set {} ({} speakers): ARI {}", set, spec.n_speakers, ari));
    if (outliers_noise) ++noise_ok;
    sizes += fmt::format("{}{}", sizes.empty() ? "" : ",", spec.n_speakers);
  }
  if (noise_ok < kNoiseSetsRequired) return fail(fmt::format("outliers all noise in only {}/10 sets", noise_ok));
  return Outcome{true, fmt::format("ARI 1.0 on speakers {}; outliers noise in {}/10", sizes, noise_ok)};
}

// ---- 7 ----

long double oracle_inertia(const EmbeddingStore& store, const KmeansResult& r) {
  long double total = 0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& c = r.centroids[static_cast<std::size_t>(r.slot_of_point[i])];
    for (std::size_t d = 0; d < store.dim(); ++d) {
      const long double diff = static_cast<long double>(store.vector(i)[d]) - c[d];
      total += diff * diff;
    }
  }
  return total;
}

Outcome kmeans_behaviour() {
  std::mt19937_64 gen(7007);
  std::size_t iterations = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 20 + gen() % 80;
    const std::size_t dim = 2 + gen() % 10;
    const std::size_t k = 2 + gen() % 8;
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Embedding> recs;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<float> v(dim);
      for (auto& x : v) x = static_cast<float>(nd(gen) + static_cast<double>(i % k) * 3.0);
      recs.push_back({fmt::format("p{:03}", i), "s", v});
    }
    const auto store = EmbeddingStore::from_records(std::move(recs), EmbeddingLoadOptions{false});
    const KmeansParams params{k, 300, static_cast<std::uint64_t>(t), 1e-9};
    const auto r = kmeans_detailed(store, params);
    iterations += r.iterations;
    for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
      if (r.inertia_trace[i] > r.inertia_trace[i - 1]) {
        return fail(fmt::format("dataset {} iteration {}: inertia {} > {}", t, i, r.inertia_trace[i],
                                r.inertia_trace[i - 1]));
      }
    }
    // Recompute the final inertia from the returned centroids and slots.
    const long double recomputed = oracle_inertia(store, r);
    if (r.converged && std::fabs(recomputed - r.inertia_trace.back()) >
                           kInertiaOracleTolerance * std::max(1.0L, recomputed)) {
      return fail(fmt::format("dataset {}: trace ends at {}, recomputed {}", t, r.inertia_trace.back(),
                              static_cast<double>(recomputed)));
    }
    const auto again = kmeans_detailed(store, params);
    const auto threaded = kmeans_detailed(store, params, 3);
    for (const auto* other : {&again, &threaded}) {
      if (other->assignment != r.assignment || other->centroids != r.centroids ||
          other->inertia_trace != r.inertia_trace) {
        return fail(fmt::format("dataset {}: repeated run differs", t));
      }
    }
  }
  return Outcome{true, fmt::format("100 datasets, {} Lloyd iterations, bit-identical reruns", iterations)};
}

// ---- 8 ----

Outcome loss_boundaries() {
  std::mt19937_64 gen(8008);
  std::uniform_real_distribution<double> loss(0.0, 20.0);
  std::uniform_real_distribution<double> interior(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double g = loss(gen), s = loss(gen);
    if (combine_loss(JointLossSpec{0.0}, g, s) != s) return fail("alpha = 0 does not return l_sdr");
    if (combine_loss(JointLossSpec{1.0}, g, s) != g) return fail("alpha = 1 does not return l_glsc");
    double alpha = interior(gen);
    while (alpha == 0.0) alpha = interior(gen);
    const long double expected = static_cast<long double>(alpha) * g + (1.0L - alpha) * s;
    const long double got = combine_loss(JointLossSpec{alpha}, g, s);
    if (std::fabs(got - expected) > kLinearityTolerance) {
      return fail(fmt::format("alpha {}: {} vs {}", alpha, static_cast<double>(got), static_cast<double>(expected)));
    }
  }
  return Outcome{true, "exact at alpha 0 and 1, 100 interior points within 1e-12"};
}

// ---- 9 ----

Outcome end_to_end() {
  SynthSpec spec;
  spec.seed = 9009;
  spec.n_speakers = 8;
  spec.n_sessions = 12;
  spec.speakers_per_session = {2, 4};
  spec.embedding_dim = 32;
  spec.intra_speaker_sigma = 0.02;
  spec.inter_speaker_min_angle = 1.2;
  const auto c = gen_corpus(spec);
  const auto emb = gen_embeddings(spec, corpus_speaker_map(c.refs));
  const auto ds = build_glsc_dataset(c.refs, emb.store, c.segment_hyps, PipelineParams{});
  const auto& r = ds.report;
  if (r.input_utterances != r.dropped_overlap + r.dropped_quality + r.dropped_noise + r.labeled) {
    return fail(fmt::format("counts {} != {} + {} + {} + {}", r.input_utterances, r.dropped_overlap,
                            r.dropped_quality, r.dropped_noise, r.labeled));
  }
  if (r.labeled != ds.segments.size() || r.labeled == 0) return fail("labeled count mismatch");
  std::map<std::string, GlscLabel> label_of;
  std::map<int, std::map<int, std::string>> speaker_of_local;
  for (const auto& ls : ds.segments) {
    auto [it, fresh] = label_of.emplace(ls.segment.speaker_id, ls.label);
    if (it->second != ls.label) {
      return fail(fmt::format("speaker {} has labels {} and {}", ls.segment.speaker_id, compose_label(it->second),
                              compose_label(ls.label)));
    }
    auto [jt, added] = speaker_of_local[ls.label.global_id].emplace(ls.label.local_id, ls.segment.speaker_id);
    if (jt->second != ls.segment.speaker_id) {
      return fail(fmt::format("{} shared by {} and {}", compose_label(ls.label), jt->second, ls.segment.speaker_id));
    }
  }
  return Outcome{true, fmt::format("{} utterances, {} labeled, {} speakers, {} clusters", r.input_utterances,
                                   r.labeled, label_of.size(), r.clusters_after_merge)};
}

// ---- 10 ----

std::string random_payload(std::mt19937_64& gen) {
  static const std::vector<std::string> pieces{"a", "word", " ", "<", "|", ">", "\\", "\\u0041", "\t", "\n",
                                               "\x01", "\x7f", "\xc3\xa9", "\xe4\xbd\xa0", "<|", "|>", "7.5"};
  std::string out;
  const std::size_t n = gen() % 10;
  for (std::size_t i = 0; i < n; ++i) out += pieces[gen() % pieces.size()];
  return out;
}

Outcome round_trips() {
  std::mt19937_64 gen(10010);
  std::size_t groups = 0;
  while (groups < 1000) {
    Session s{"rt", {}};
    const std::size_t n = 1 + gen() % 6;
    double clock = static_cast<double>(gen() % 1000) / 7.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double start = clock + static_cast<double>(gen() % 40) / 13.0;
      const double end = start + static_cast<double>(gen() % 60) / 11.0;
      std::string spk = random_payload(gen);
      if (spk.empty()) spk = "S";
      s.utterances.push_back({"rt", spk, start, end, random_payload(gen)});
      clock = start;
    }
    for (const auto& g : turn_group_segmentation(s, 0.5, 20.0)) {
      const auto text = serialize_sdr(g);
      const auto parsed = parse_sot(text, false);
      if (parsed.sequence != sdr_sequence(g) || serialize(parsed.sequence) != text) {
        return fail("round trip differs for " + text);
      }
      ++groups;
    }
  }

  for (int t = 0; t < 10000; ++t) {
    std::string bytes;
    if (t % 2 == 0) {
      bytes.resize(gen() % 64);
      for (auto& b : bytes) b = static_cast<char>(gen() % 256);
    } else {
      SotSequence seq{SotTask::kSdr, {{0.0, 1.0, "A", random_payload(gen)}, {1.0, 2.5, "B", "x"}}};
      bytes = serialize(seq);
      for (std::size_t m = 1 + gen() % 4; m > 0; --m) {
        const std::size_t pos = gen() % bytes.size();
        switch (gen() % 3) {
          case 0: bytes[pos] = static_cast<char>(gen() % 256); break;
          case 1: bytes.erase(pos, 1 + gen() % 5); break;
          default: bytes.insert(pos, 1, "<|>:\\."[gen() % 6]); break;
        }
        if (bytes.empty()) bytes = "<";
      }
    }
    try {
      parse_sot(bytes, true);
    } catch (const std::exception& e) {
      return fail(fmt::format("lenient parse threw on fuzz input {}: {}", t, e.what()));
    }
  }

  SynthSpec spec;
  spec.seed = 10011;
  spec.n_outliers = 5;
  const auto emb = gen_embeddings(spec, uniform_speaker_map(6, 20));
  std::ostringstream first;
  save_embeddings(emb.store, first, EmbeddingFormat::kBinary);
  std::istringstream in(first.str());
  const auto loaded = load_embeddings(in, EmbeddingFormat::kBinary);
  std::ostringstream second;
  save_embeddings(loaded, second, EmbeddingFormat::kBinary);
  if (first.str() != second.str()) return fail("embedding binary save/load/save differs");
  return Outcome{true, fmt::format("{} turn groups, 10000 fuzz inputs, {} byte embedding file", groups,
                                   first.str().size())};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "delta-cp arithmetic on reported scores", 1.0, delta_cp_arithmetic},
      {2, "cpWER assignment equals exhaustive search", 30.0, cpwer_oracle},
      {3, "alignment equals brute-force edit distance", 10.0, alignment_oracle},
      {4, "quality-filter boundary matrix", 0.0, quality_boundaries},
      {5, "centroid merge threshold", 0.0, merge_threshold},
      {6, "HDBSCAN recovers synthetic speakers", 60.0, hdbscan_recovery},
      {7, "k-means inertia and determinism", 30.0, kmeans_behaviour},
      {8, "joint loss boundaries and linearity", 0.0, loss_boundaries},
      {9, "end-to-end labels on synthetic truth", 0.0, end_to_end},
      {10, "format round trips and fuzzing", 60.0, round_trips},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && c.limit_s > 0 && secs >= c.limit_s) {
      o = fail(fmt::format("{} (took {:.2f}s, limit {}s)", o.detail, secs, c.limit_s));
    }
    if (!o.pass) ++failures;
    fmt::print("{} [{}] {}: {} ({:.2f}s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail, secs);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}

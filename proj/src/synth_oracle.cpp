#include "glsc/synth_oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "json.hpp"

#include "glsc/error.hpp"
#include "glsc/glsc_pipeline.hpp"
#include "glsc/random.hpp"

namespace glsc {

namespace {

constexpr std::size_t kCentroidAttempts = 10000;
constexpr std::size_t kOutlierAttempts = 1000000;

void check(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "synth spec: " + message);
}

bool is_ratio(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

std::size_t draw(std::mt19937_64& gen, CountRange range) {
  return static_cast<std::size_t>(rng::uniform_int(gen, static_cast<std::int64_t>(range.lo),
                                                   static_cast<std::int64_t>(range.hi)));
}

std::vector<double> random_unit(std::mt19937_64& gen, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  while (norm < 1e-12) {
    norm = 0.0;
    for (auto& x : v) {
      x = rng::standard_normal(gen);
      norm += x * x;
    }
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

void normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  return 1.0 - dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

// Largest edge of the minimum spanning tree under cosine distance (Prim).
double bottleneck(const std::vector<std::vector<double>>& points) {
  if (points.size() < 2) return 0.0;
  std::vector<double> best(points.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> in_tree(points.size(), false);
  std::size_t current = 0;
  double widest = 0.0;
  for (std::size_t added = 1; added < points.size(); ++added) {
    in_tree[current] = true;
    std::size_t next = 0;
    double next_w = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (in_tree[i]) continue;
      best[i] = std::min(best[i], cosine_distance(points[current], points[i]));
      if (best[i] < next_w) {
        next_w = best[i];
        next = i;
      }
    }
    widest = std::max(widest, next_w);
    current = next;
  }
  return widest;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

void validate(const SynthSpec& spec) {
  check(spec.n_speakers >= 1, "n_speakers must be >= 1");
  check(spec.speakers_per_session.lo >= 1 && spec.speakers_per_session.lo <= spec.speakers_per_session.hi,
        "bad speakers_per_session range");
  check(spec.speakers_per_session.hi <= spec.n_speakers, "speakers_per_session exceeds n_speakers");
  check(spec.utterances_per_session.lo <= spec.utterances_per_session.hi, "bad utterances_per_session range");
  check(spec.utterances_per_session.lo >= spec.speakers_per_session.hi,
        "every session needs at least one utterance per speaker");
  check(spec.words_per_utterance.lo >= 1 && spec.words_per_utterance.lo <= spec.words_per_utterance.hi,
        "bad words_per_utterance range");
  check(spec.vocab_size >= 1, "vocab_size must be >= 1");
  check(is_ratio(spec.sub_rate) && is_ratio(spec.del_rate) && is_ratio(spec.ins_rate),
        "error rates must lie in [0, 1]");
  check(spec.sub_rate + spec.del_rate + spec.ins_rate <= 1.0, "sub_rate + del_rate + ins_rate must not exceed 1");
  check(is_ratio(spec.attribution_error_rate), "attribution_error_rate must lie in [0, 1]");
  check(spec.embedding_dim >= 1, "embedding_dim must be >= 1");
  check(std::isfinite(spec.intra_speaker_sigma) && spec.intra_speaker_sigma >= 0.0,
        "intra_speaker_sigma must be >= 0");
  check(std::isfinite(spec.inter_speaker_min_angle) && spec.inter_speaker_min_angle >= 0.0 &&
            spec.inter_speaker_min_angle <= std::numbers::pi,
        "inter_speaker_min_angle must lie in [0, pi]");
  check(is_ratio(spec.common_direction_weight) && spec.common_direction_weight < 1.0,
        "common_direction_weight must lie in [0, 1)");
}

SynthCorpus gen_corpus(const SynthSpec& spec) {
  validate(spec);
  std::mt19937_64 gen(spec.seed);
  SynthCorpus corpus;
  auto& truth = corpus.truth;
  std::int64_t next_error_token = 0;

  for (std::size_t s = 0; s < spec.n_sessions; ++s) {
    const std::string session_id = fmt::format("sess{:03}", s);
    std::vector<std::size_t> pool(spec.n_speakers);
    std::iota(pool.begin(), pool.end(), 0);
    const std::size_t k = draw(gen, spec.speakers_per_session);
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(pool[i], pool[i + rng::uniform_index(gen, pool.size() - i)]);
    }
    std::vector<std::string> speakers;
    for (std::size_t i = 0; i < k; ++i) speakers.push_back(fmt::format("spk{:03}", pool[i]));

    const std::size_t n_utts = draw(gen, spec.utterances_per_session);
    Session ref{session_id, {}};
    Session hyp{session_id, {}};
    SessionTruth st{session_id, k, 0, 0, 0, 0, 0};
    // One session never mixes deletions and insertions: a deletion and an
    // insertion can otherwise pair up as a single substitution.
    const double extra_rate = spec.del_rate + spec.ins_rate;
    const bool deleting = extra_rate > 0.0 && rng::uniform01(gen) * extra_rate < spec.del_rate;
    std::int64_t tick = 0;

    for (std::size_t u = 0; u < n_utts; ++u) {
      const std::string& speaker = u < k ? speakers[u] : speakers[rng::uniform_index(gen, k)];
      const std::size_t n_words = draw(gen, spec.words_per_utterance);
      std::vector<std::string> ref_words;
      std::vector<std::string> hyp_words;
      for (std::size_t w = 0; w < n_words; ++w) {
        ref_words.push_back(fmt::format("w{}", rng::uniform_index(gen, spec.vocab_size)));
        const double r = rng::uniform01(gen);
        if (r < spec.sub_rate) {
          hyp_words.push_back(fmt::format("x{}", next_error_token++));
          ++st.substitutions;
        } else if (deleting && r < spec.sub_rate + extra_rate) {
          ++st.deletions;
        } else {
          hyp_words.push_back(ref_words.back());
        }
        if (!deleting && rng::bernoulli(gen, extra_rate)) {
          hyp_words.push_back(fmt::format("x{}", next_error_token++));
          ++st.insertions;
        }
      }
      st.ref_len += static_cast<std::int64_t>(n_words);

      const std::int64_t duration = static_cast<std::int64_t>(n_words) * 3 + rng::uniform_int(gen, 2, 6);
      const double start = static_cast<double>(tick) / 10.0;
      const double end = static_cast<double>(tick + duration) / 10.0;
      tick += duration + (rng::bernoulli(gen, 0.4) ? 0 : rng::uniform_int(gen, 1, 10));

      ref.utterances.push_back(Utterance{session_id, speaker, start, end, join(ref_words)});
      hyp.utterances.push_back(Utterance{session_id, speaker, start, end, join(hyp_words)});
    }

    // Attribution errors.
    std::map<std::string, std::size_t> count;
    for (const auto& utt : hyp.utterances) ++count[utt.speaker_id];
    for (auto& utt : hyp.utterances) {
      if (k < 2 || !rng::bernoulli(gen, spec.attribution_error_rate)) continue;
      std::size_t pick = rng::uniform_index(gen, k - 1);
      const auto own = static_cast<std::size_t>(
          std::find(speakers.begin(), speakers.end(), utt.speaker_id) - speakers.begin());
      if (pick >= own) ++pick;
      if (count[utt.speaker_id] < 2) continue;
      --count[utt.speaker_id];
      utt.speaker_id = speakers[pick];
      ++count[utt.speaker_id];
      ++st.reassignments;
    }

    const auto ids = utterance_ids(ref);
    for (std::size_t i = 0; i < ids.size(); ++i) corpus.segment_hyps.emplace(ids[i], hyp.utterances[i].text);

    truth.ref_len += st.ref_len;
    truth.substitutions += st.substitutions;
    truth.deletions += st.deletions;
    truth.insertions += st.insertions;
    truth.reassignments += st.reassignments;
    truth.sessions.push_back(st);
    corpus.refs.push_back(std::move(ref));
    corpus.hyps.push_back(std::move(hyp));
  }
  return corpus;
}

SynthEmbeddings gen_embeddings(const SynthSpec& spec,
                               const std::map<std::string, std::string>& speaker_of) {
  validate(spec);
  std::mt19937_64 gen(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::set<std::string> speaker_set;
  for (const auto& [seg, spk] : speaker_of) speaker_set.insert(spk);
  const std::vector<std::string> speakers(speaker_set.begin(), speaker_set.end());
  const std::size_t dim = spec.embedding_dim;
  const double max_cos = std::cos(spec.inter_speaker_min_angle);
  if (speakers.size() > 1 && max_cos < -1.0 / static_cast<double>(speakers.size() - 1)) {
    throw Error(ErrorCode::kSeparationInfeasible,
                fmt::format("{} speakers cannot be pairwise {} rad apart", speakers.size(),
                            spec.inter_speaker_min_angle));
  }

  const auto common = random_unit(gen, dim);
  const double w = spec.common_direction_weight;
  SynthEmbeddings out;
  for (std::size_t s = 0; s < speakers.size(); ++s) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kCentroidAttempts && !placed; ++attempt) {
      auto c = random_unit(gen, dim);
      for (std::size_t d = 0; d < dim; ++d) c[d] = std::sqrt(w) * common[d] + std::sqrt(1.0 - w) * c[d];
      normalize(c);
      placed = std::all_of(out.centroids.begin(), out.centroids.end(),
                           [&](const std::vector<double>& other) { return dot(c, other) <= max_cos; });
      if (placed) out.centroids.push_back(std::move(c));
    }
    if (!placed) {
      throw Error(ErrorCode::kSeparationInfeasible,
                  fmt::format("could not place speaker {} of {} at min angle {} in dim {}", s + 1,
                              speakers.size(), spec.inter_speaker_min_angle, dim));
    }
  }

  std::vector<Embedding> records;
  std::vector<std::vector<double>> placed;
  auto add = [&](const std::string& seg, const std::string& spk, const std::vector<double>& v) {
    records.push_back(Embedding{seg, spk, std::vector<float>(v.begin(), v.end())});
    placed.emplace_back(records.back().vector.begin(), records.back().vector.end());
  };
  for (const auto& [seg, spk] : speaker_of) {
    const auto idx = static_cast<int>(std::lower_bound(speakers.begin(), speakers.end(), spk) - speakers.begin());
    auto v = out.centroids[static_cast<std::size_t>(idx)];
    for (auto& x : v) x += spec.intra_speaker_sigma * rng::standard_normal(gen);
    normalize(v);
    add(seg, spk, v);
    out.truth.emplace(seg, idx);
  }
  // An outlier must be farther from every speaker segment than the speakers'
  // widest single-linkage step, so it joins no speaker before the speakers
  // join up.
  const double reach = bottleneck(placed);
  const std::vector<std::vector<double>> speaker_points = placed;
  for (std::size_t o = 0; o < spec.n_outliers; ++o) {
    const auto seg = fmt::format("outlier_{:04}", o);
    bool far = false;
    for (std::size_t attempt = 0; attempt < kOutlierAttempts && !far; ++attempt) {
      const auto v = random_unit(gen, dim);
      std::vector<double> as_stored;
      for (const double x : v) as_stored.push_back(static_cast<float>(x));
      far = std::all_of(speaker_points.begin(), speaker_points.end(),
                        [&](const std::vector<double>& p) { return cosine_distance(as_stored, p) > reach; });
      if (far) add(seg, "outlier", v);
    }
    if (!far) {
      throw Error(ErrorCode::kSeparationInfeasible,
                  fmt::format("could not place outlier {} farther than {} from all speaker segments", o + 1, reach));
    }
    out.truth.emplace(seg, -1);
  }
  out.store = EmbeddingStore::from_records(std::move(records));
  return out;
}

std::map<std::string, std::string> corpus_speaker_map(const std::vector<Session>& refs) {
  std::map<std::string, std::string> out;
  for (const auto& session : refs) {
    const auto ids = utterance_ids(session);
    for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], session.utterances[i].speaker_id);
  }
  return out;
}

std::map<std::string, std::string> uniform_speaker_map(std::size_t n_speakers, std::size_t per_speaker) {
  std::map<std::string, std::string> out;
  for (std::size_t s = 0; s < n_speakers; ++s) {
    for (std::size_t j = 0; j < per_speaker; ++j) {
      out.emplace(fmt::format("s{:03}_{:04}", s, j), fmt::format("spk{:03}", s));
    }
  }
  return out;
}

namespace {

using nlohmann::ordered_json;

ordered_json range_json(CountRange r) { return ordered_json::array({r.lo, r.hi}); }

CountRange range_from(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::kParse, "synth spec: '" + key + "' must be [lo, hi]");
  }
  return CountRange{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

}  // namespace

std::string spec_to_json(const SynthSpec& spec) {
  ordered_json j;
  j["seed"] = spec.seed;
  j["n_speakers"] = spec.n_speakers;
  j["n_sessions"] = spec.n_sessions;
  j["speakers_per_session"] = range_json(spec.speakers_per_session);
  j["utterances_per_session"] = range_json(spec.utterances_per_session);
  j["words_per_utterance"] = range_json(spec.words_per_utterance);
  j["vocab_size"] = spec.vocab_size;
  j["error_rates"] = {{"sub", spec.sub_rate}, {"del", spec.del_rate}, {"ins", spec.ins_rate}};
  j["attribution_error_rate"] = spec.attribution_error_rate;
  j["embedding_dim"] = spec.embedding_dim;
  j["intra_speaker_sigma"] = spec.intra_speaker_sigma;
  j["inter_speaker_min_angle"] = spec.inter_speaker_min_angle;
  j["common_direction_weight"] = spec.common_direction_weight;
  j["n_outliers"] = spec.n_outliers;
  return j.dump(2) + "\n";
}

SynthSpec spec_from_json(std::string_view text) {
  SynthSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kParse, "synth spec must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") spec.seed = value.get<std::uint64_t>();
      else if (key == "n_speakers") spec.n_speakers = value.get<std::size_t>();
      else if (key == "n_sessions") spec.n_sessions = value.get<std::size_t>();
      else if (key == "speakers_per_session") spec.speakers_per_session = range_from(value, key);
      else if (key == "utterances_per_session") spec.utterances_per_session = range_from(value, key);
      else if (key == "words_per_utterance") spec.words_per_utterance = range_from(value, key);
      else if (key == "vocab_size") spec.vocab_size = value.get<std::size_t>();
      else if (key == "error_rates") {
        for (const auto& [rk, rv] : value.items()) {
          if (rk == "sub") spec.sub_rate = rv.get<double>();
          else if (rk == "del") spec.del_rate = rv.get<double>();
          else if (rk == "ins") spec.ins_rate = rv.get<double>();
          else throw Error(ErrorCode::kParse, "synth spec: unknown error rate '" + rk + "'");
        }
      }
      else if (key == "attribution_error_rate") spec.attribution_error_rate = value.get<double>();
      else if (key == "embedding_dim") spec.embedding_dim = value.get<std::size_t>();
      else if (key == "intra_speaker_sigma") spec.intra_speaker_sigma = value.get<double>();
      else if (key == "inter_speaker_min_angle") spec.inter_speaker_min_angle = value.get<double>();
      else if (key == "common_direction_weight") spec.common_direction_weight = value.get<double>();
      else if (key == "n_outliers") spec.n_outliers = value.get<std::size_t>();
      else throw Error(ErrorCode::kParse, "synth spec: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("synth spec: ") + e.what());
  }
  return spec;
}

std::string truth_to_json(const CorpusTruth& truth) {
  auto counts = [](const auto& t) {
    return ordered_json{{"ref_len", t.ref_len},
                        {"substitutions", t.substitutions},
                        {"deletions", t.deletions},
                        {"insertions", t.insertions},
                        {"errors", t.errors()},
                        {"reassignments", t.reassignments}};
  };
  ordered_json j;
  j["sessions"] = ordered_json::array();
  for (const auto& st : truth.sessions) {
    auto entry = ordered_json{{"session_id", st.session_id}, {"ref_speakers", st.ref_speakers}};
    entry.update(counts(st));
    j["sessions"].push_back(std::move(entry));
  }
  j["totals"] = counts(truth);
  return j.dump(2) + "\n";
}

}  // namespace glsc

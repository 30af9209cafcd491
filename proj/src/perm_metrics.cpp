#include "glsc/perm_metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

#include "json.hpp"

#include "glsc/assignment.hpp"
#include "glsc/error.hpp"
#include "glsc/parallel.hpp"

namespace glsc {

namespace {

nlohmann::ordered_json ratio_json(double ratio) {
  if (is_undefined(ratio)) return "undefined";
  return ratio;
}

}  // namespace

std::map<std::string, TokenSeq> concat_by_speaker(const Session& session, TokenMode mode) {
  std::map<std::string, TokenSeq> streams;
  for (std::size_t idx : chronological_order(session.utterances)) {
    const auto& u = session.utterances[idx];
    auto tokens = tokenize(u.text, mode);
    auto& stream = streams[u.speaker_id];
    stream.insert(stream.end(), std::make_move_iterator(tokens.begin()),
                  std::make_move_iterator(tokens.end()));
  }
  return streams;
}

CpwerResult cpwer(const Session& ref, const Session& hyp, TokenMode mode, CpwerSolver solver) {
  const auto ref_streams = concat_by_speaker(ref, mode);
  const auto hyp_streams = concat_by_speaker(hyp, mode);
  std::vector<const std::string*> ref_ids;
  std::vector<const TokenSeq*> ref_seqs;
  std::vector<const std::string*> hyp_ids;
  std::vector<const TokenSeq*> hyp_seqs;
  CpwerResult result;
  for (const auto& [id, seq] : ref_streams) {
    ref_ids.push_back(&id);
    ref_seqs.push_back(&seq);
    result.ref_len += static_cast<std::int64_t>(seq.size());
  }
  for (const auto& [id, seq] : hyp_streams) {
    hyp_ids.push_back(&id);
    hyp_seqs.push_back(&seq);
  }

  // Rows: reference speakers then EMPTY pads; columns: hypothesis speakers then EMPTY pads.
  const std::size_t n = std::max(ref_ids.size(), hyp_ids.size());
  CostMatrix cost(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool real_ref = i < ref_ids.size();
      const bool real_hyp = j < hyp_ids.size();
      if (real_ref && real_hyp) {
        cost(i, j) = edit_distance(*ref_seqs[i], *hyp_seqs[j]);
      } else if (real_ref) {
        cost(i, j) = static_cast<std::int64_t>(ref_seqs[i]->size());
      } else if (real_hyp) {
        cost(i, j) = static_cast<std::int64_t>(hyp_seqs[j]->size());
      }
    }
  }

  const AssignmentResult match = solver == CpwerSolver::kExhaustive
                                     ? solve_assignment_exhaustive(cost)
                                     : solve_assignment_lexicographic(cost);
  result.errors = match.total;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = match.col_of_row[i];
    SpeakerPair pair;
    if (i < ref_ids.size()) pair.ref = *ref_ids[i];
    if (j < hyp_ids.size()) pair.hyp = *hyp_ids[j];
    result.mapping.pairs.push_back(std::move(pair));
  }
  return result;
}

double delta_cp(double cpwer_value, double wer_value) {
  if (is_undefined(cpwer_value) || is_undefined(wer_value)) return kUndefinedRatio;
  return cpwer_value - wer_value;
}

std::size_t distinct_speakers(const Session& session) {
  std::set<std::string_view> ids;
  for (const auto& u : session.utterances) ids.insert(u.speaker_id);
  return ids.size();
}

double sca(std::span<const SessionPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyCorpus, "speaker count accuracy of empty corpus");
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    if (distinct_speakers(*p.ref) == distinct_speakers(*p.hyp)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

std::vector<SessionPair> pair_sessions(const std::vector<Session>& refs,
                                       const std::vector<Session>& hyps) {
  std::map<std::string_view, const Session*> hyp_by_id;
  for (const auto& s : hyps) hyp_by_id.emplace(s.session_id, &s);
  std::map<std::string_view, const Session*> ref_by_id;
  for (const auto& s : refs) ref_by_id.emplace(s.session_id, &s);

  std::vector<SessionPair> pairs;
  for (const auto& [id, ref] : ref_by_id) {
    auto it = hyp_by_id.find(id);
    if (it == hyp_by_id.end()) {
      throw Error(ErrorCode::kUnpairedSession,
                  "session '" + std::string(id) + "' has no hypothesis");
    }
    pairs.push_back({ref, it->second});
  }
  for (const auto& [id, hyp] : hyp_by_id) {
    if (!ref_by_id.contains(id)) {
      throw Error(ErrorCode::kUnpairedSession,
                  "session '" + std::string(id) + "' has no reference");
    }
  }
  return pairs;
}

SessionMetrics evaluate_session(const Session& ref, const Session& hyp, TokenMode mode) {
  SessionMetrics m;
  m.session_id = ref.session_id;
  m.wer_stats = session_alignment(ref, hyp, mode);
  m.cp = cpwer(ref, hyp, mode);
  m.ref_speaker_count = distinct_speakers(ref);
  m.hyp_speaker_count = distinct_speakers(hyp);
  return m;
}

MetricsReport evaluate_corpus(const std::vector<Session>& refs,
                              const std::vector<Session>& hyps, TokenMode mode,
                              unsigned threads) {
  const auto pairs = pair_sessions(refs, hyps);
  MetricsReport report;
  report.per_session.resize(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    report.per_session[i] = evaluate_session(*pairs[i].ref, *pairs[i].hyp, mode);
  });

  auto& c = report.corpus;
  for (const auto& row : report.per_session) {
    c.wer_errors += row.wer_stats.errors();
    c.cpwer_errors += row.cp.errors;
    c.ref_len += row.wer_stats.ref_len;
  }
  c.wer = error_ratio(c.wer_errors, c.ref_len);
  c.cpwer = error_ratio(c.cpwer_errors, c.ref_len);
  c.delta_cp = delta_cp(c.cpwer, c.wer);
  c.sca = pairs.empty() ? 0.0 : sca(pairs);
  return report;
}

std::string format_percent(double ratio) {
  if (is_undefined(ratio)) return "undefined";
  return fmt::format("{:.2f}", ratio * 100.0);
}

std::string render_table(const MetricsReport& report) {
  std::string out = fmt::format("{:<24} {:>10} {:>10} {:>10} {:>6} {:>6}\n", "session", "WER%",
                                "cpWER%", "dcp%", "#ref", "#hyp");
  for (const auto& row : report.per_session) {
    out += fmt::format("{:<24} {:>10} {:>10} {:>10} {:>6} {:>6}\n", row.session_id,
                       format_percent(row.wer()), format_percent(row.cpwer()),
                       format_percent(row.delta_cp()), row.ref_speaker_count,
                       row.hyp_speaker_count);
  }
  const auto& c = report.corpus;
  out += fmt::format("{:<24} {:>10} {:>10} {:>10}   SCA% {}\n", "CORPUS", format_percent(c.wer),
                     format_percent(c.cpwer), format_percent(c.delta_cp),
                     format_percent(c.sca));
  return out;
}

std::string render_json(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["per_session"] = nlohmann::ordered_json::array();
  for (const auto& row : report.per_session) {
    nlohmann::ordered_json r;
    r["session_id"] = row.session_id;
    r["wer"] = ratio_json(row.wer());
    r["cpwer"] = ratio_json(row.cpwer());
    r["delta_cp"] = ratio_json(row.delta_cp());
    r["ref_speaker_count"] = row.ref_speaker_count;
    r["hyp_speaker_count"] = row.hyp_speaker_count;
    r["ref_len"] = row.wer_stats.ref_len;
    r["substitutions"] = row.wer_stats.substitutions;
    r["deletions"] = row.wer_stats.deletions;
    r["insertions"] = row.wer_stats.insertions;
    r["cpwer_errors"] = row.cp.errors;
    if (row.cp.undefined()) r["status"] = std::string(error_code_name(ErrorCode::kEmptyReference));
    auto mapping = nlohmann::ordered_json::array();
    for (const auto& p : row.cp.mapping.pairs) {
      mapping.push_back({p.ref ? nlohmann::ordered_json(*p.ref) : nullptr,
                         p.hyp ? nlohmann::ordered_json(*p.hyp) : nullptr});
    }
    r["mapping"] = std::move(mapping);
    doc["per_session"].push_back(std::move(r));
  }
  const auto& c = report.corpus;
  doc["corpus"]["wer"] = ratio_json(c.wer);
  doc["corpus"]["cpwer"] = ratio_json(c.cpwer);
  doc["corpus"]["delta_cp"] = ratio_json(c.delta_cp);
  doc["corpus"]["sca"] = c.sca;
  doc["corpus"]["ref_len"] = c.ref_len;
  doc["corpus"]["wer_errors"] = c.wer_errors;
  doc["corpus"]["cpwer_errors"] = c.cpwer_errors;
  return doc.dump(2) + "\n";
}

}  // namespace glsc

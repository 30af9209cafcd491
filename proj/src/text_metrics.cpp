#include "glsc/text_metrics.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "glsc/error.hpp"
#include "glsc/utf8.hpp"

namespace glsc {

namespace {

// Lowercases and strips leading/trailing punctuation; appends if anything is left.
void emit_token(const std::vector<char32_t>& cps, std::size_t begin, std::size_t end,
                TokenSeq& out) {
  while (begin < end && utf8::is_punctuation(cps[begin])) ++begin;
  while (end > begin && utf8::is_punctuation(cps[end - 1])) --end;
  if (begin == end) return;
  std::string text;
  for (std::size_t i = begin; i < end; ++i) utf8::append(text, utf8::to_lower_latin(cps[i]));
  out.push_back(Token{std::move(text)});
}

// Maps both sequences onto dense integer ids so the DP compares integers.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> intern(const TokenSeq& a,
                                                                         const TokenSeq& b) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  auto map_seq = [&ids](const TokenSeq& seq) {
    std::vector<std::uint32_t> out;
    out.reserve(seq.size());
    for (const auto& t : seq) {
      auto [it, inserted] = ids.try_emplace(t.text, static_cast<std::uint32_t>(ids.size()));
      out.push_back(it->second);
    }
    return out;
  };
  auto ia = map_seq(a);
  auto ib = map_seq(b);
  return {std::move(ia), std::move(ib)};
}

enum : std::uint8_t { kDiag = 0, kDel = 1, kIns = 2 };

}  // namespace

std::string_view to_string(TokenMode mode) {
  switch (mode) {
    case TokenMode::kWord: return "word";
    case TokenMode::kChar: return "char";
    case TokenMode::kAuto: return "auto";
  }
  return "auto";
}

TokenMode parse_token_mode(std::string_view name) {
  if (name == "word") return TokenMode::kWord;
  if (name == "char") return TokenMode::kChar;
  if (name == "auto") return TokenMode::kAuto;
  throw Error(ErrorCode::kInvalidArgument, "unknown token mode '" + std::string(name) + "'");
}

TokenSeq tokenize(std::string_view text, TokenMode mode) {
  const auto cps = utf8::decode_lossy(text);
  TokenSeq out;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (utf8::is_whitespace(cps[i])) {
      ++i;
      continue;
    }
    if (mode == TokenMode::kChar || (mode == TokenMode::kAuto && utf8::is_cjk(cps[i]))) {
      emit_token(cps, i, i + 1, out);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !utf8::is_whitespace(cps[j]) &&
           !(mode == TokenMode::kAuto && utf8::is_cjk(cps[j]))) {
      ++j;
    }
    emit_token(cps, i, j, out);
    i = j;
  }
  return out;
}

AlignmentStats& AlignmentStats::operator+=(const AlignmentStats& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  correct += other.correct;
  ref_len += other.ref_len;
  return *this;
}

AlignmentStats align(const TokenSeq& ref, const TokenSeq& hyp) {
  const auto [r, h] = intern(ref, hyp);
  const std::size_t m = r.size();
  const std::size_t n = h.size();
  const std::size_t width = n + 1;

  // Backtrace direction per cell, chosen with the fixed preference order.
  std::vector<std::uint8_t> dir((m + 1) * width, kIns);
  std::vector<std::int64_t> prev(width);
  std::vector<std::int64_t> cur(width);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = static_cast<std::int64_t>(i);
    dir[i * width] = kDel;
    for (std::size_t j = 1; j <= n; ++j) {
      const std::int64_t diag = prev[j - 1] + (r[i - 1] == h[j - 1] ? 0 : 1);
      const std::int64_t del = prev[j] + 1;
      const std::int64_t ins = cur[j - 1] + 1;
      const std::int64_t best = std::min({diag, del, ins});
      cur[j] = best;
      dir[i * width + j] = diag == best ? kDiag : (del == best ? kDel : kIns);
    }
    std::swap(prev, cur);
  }

  AlignmentStats stats;
  stats.ref_len = static_cast<std::int64_t>(m);
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 || j > 0) {
    switch (dir[i * width + j]) {
      case kDiag:
        if (r[i - 1] == h[j - 1]) {
          ++stats.correct;
        } else {
          ++stats.substitutions;
        }
        --i;
        --j;
        break;
      case kDel:
        ++stats.deletions;
        --i;
        break;
      default:
        ++stats.insertions;
        --j;
        break;
    }
  }
  return stats;
}

std::int64_t edit_distance(const TokenSeq& ref, const TokenSeq& hyp) {
  auto [r, h] = intern(ref, hyp);
  if (h.size() > r.size()) std::swap(r, h);
  const std::size_t n = h.size();
  std::vector<std::int64_t> prev(n + 1);
  std::vector<std::int64_t> cur(n + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= r.size(); ++i) {
    cur[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= n; ++j) {
      cur[j] = std::min({prev[j - 1] + (r[i - 1] == h[j - 1] ? 0 : 1), prev[j] + 1,
                         cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

double error_ratio(std::int64_t errors, std::int64_t ref_len) {
  if (ref_len == 0) return errors == 0 ? 0.0 : kUndefinedRatio;
  return static_cast<double>(errors) / static_cast<double>(ref_len);
}

double wer(const AlignmentStats& stats) { return error_ratio(stats.errors(), stats.ref_len); }

TokenSeq concat_chronological(const Session& session, TokenMode mode) {
  TokenSeq out;
  for (std::size_t idx : chronological_order(session.utterances)) {
    auto tokens = tokenize(session.utterances[idx].text, mode);
    out.insert(out.end(), std::make_move_iterator(tokens.begin()),
               std::make_move_iterator(tokens.end()));
  }
  return out;
}

AlignmentStats session_alignment(const Session& ref, const Session& hyp, TokenMode mode) {
  return align(concat_chronological(ref, mode), concat_chronological(hyp, mode));
}

double session_wer(const Session& ref, const Session& hyp, TokenMode mode) {
  return wer(session_alignment(ref, hyp, mode));
}

}  // namespace glsc

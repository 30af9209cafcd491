#pragma once

// Shared fixtures and brute-force oracles. Nothing here calls into the code
// under test except for plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "glsc/text_metrics.hpp"
#include "glsc/transcript.hpp"

namespace test {

struct Turn {
  std::string speaker;
  double start;
  double end;
  std::string text;
};

inline glsc::Session session(const std::string& id, const std::vector<Turn>& turns) {
  glsc::Session s{id, {}};
  for (const auto& t : turns) s.utterances.push_back({id, t.speaker, t.start, t.end, t.text});
  return s;
}

inline glsc::TokenSeq toks(const std::vector<std::string>& words) {
  glsc::TokenSeq out;
  for (const auto& w : words) out.push_back(glsc::Token{w});
  return out;
}

// Plain recursion over the three edit operations, no memo table.
inline std::int64_t brute_edit_distance(const glsc::TokenSeq& a, std::size_t i, const glsc::TokenSeq& b,
                                        std::size_t j) {
  if (i == a.size()) return static_cast<std::int64_t>(b.size() - j);
  if (j == b.size()) return static_cast<std::int64_t>(a.size() - i);
  const std::int64_t diag = brute_edit_distance(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0 : 1);
  const std::int64_t del = brute_edit_distance(a, i + 1, b, j) + 1;
  const std::int64_t ins = brute_edit_distance(a, i, b, j + 1) + 1;
  return std::min({diag, del, ins});
}

inline std::int64_t brute_edit_distance(const glsc::TokenSeq& a, const glsc::TokenSeq& b) {
  return brute_edit_distance(a, 0, b, 0);
}

inline glsc::TokenSeq random_tokens(std::mt19937_64& gen, std::size_t max_len, int alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  glsc::TokenSeq out(len(gen));
  for (auto& t : out) t.text = std::string(1, static_cast<char>('a' + sym(gen)));
  return out;
}

// Minimum over every permutation of a square cost matrix (rows -> columns).
inline std::int64_t brute_assignment(const std::vector<std::vector<std::int64_t>>& cost) {
  std::vector<std::size_t> perm(cost.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  do {
    std::int64_t total = 0;
    for (std::size_t r = 0; r < perm.size(); ++r) total += cost[r][perm[r]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Minimum spanning tree weight by enumerating every (n-1)-edge subset of the
// complete graph and keeping the connected ones. Feasible for n <= 6 or so.
inline double brute_mst_weight(const std::vector<std::vector<double>>& w) {
  const std::size_t n = w.size();
  if (n < 2) return 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) edges.emplace_back(a, b);
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> pick(edges.size(), false);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(n - 1), pick.end(), true);
  do {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
      return parent[x] == x ? x : root(parent[x]);
    };
    double total = 0.0;
    std::size_t joined = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!pick[e]) continue;
      const auto ra = root(edges[e].first);
      const auto rb = root(edges[e].second);
      if (ra != rb) {
        parent[ra] = rb;
        ++joined;
      }
      total += w[edges[e].first][edges[e].second];
    }
    if (joined == n - 1) best = std::min(best, total);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

// Adjusted Rand index straight from pair counting (O(n^2)).
inline double pair_counting_ari(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double both = 0, only_a = 0, only_b = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      both += sa && sb;
      only_a += sa;
      only_b += sb;
      pairs += 1;
    }
  }
  if (pairs == 0) return 1.0;
  const double expected = only_a * only_b / pairs;
  const double max_index = 0.5 * (only_a + only_b);
  if (max_index == expected) return both == expected ? 1.0 : 0.0;
  return (both - expected) / (max_index - expected);
}

inline std::vector<float> unit_float(std::vector<double> v) {
  double n = 0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  std::vector<float> out;
  for (double x : v) out.push_back(static_cast<float>(x / n));
  return out;
}

template <typename T>
long double cosine_ld(const std::vector<T>& a, const std::vector<T>& b) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<long double>(a[i]) * b[i];
    aa += static_cast<long double>(a[i]) * a[i];
    bb += static_cast<long double>(b[i]) * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace test

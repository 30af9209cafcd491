#include "glsc/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace glsc {

AssignmentResult solve_assignment(const CostMatrix& cost) {
  const std::size_t n = cost.size();
  AssignmentResult result;
  if (n == 0) return result;

  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based potentials; row_of_col[0] is the virtual row being inserted.
  std::vector<std::int64_t> u(n + 1, 0);
  std::vector<std::int64_t> v(n + 1, 0);
  std::vector<std::size_t> row_of_col(n + 1, 0);
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = row_of_col[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  result.col_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) result.col_of_row[row_of_col[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) result.total += cost(i, result.col_of_row[i]);
  return result;
}

AssignmentResult solve_assignment_lexicographic(const CostMatrix& cost) {
  const std::size_t n = cost.size();
  AssignmentResult result;
  result.total = solve_assignment(cost).total;
  result.col_of_row.assign(n, 0);

  std::vector<std::size_t> free_cols(n);
  std::iota(free_cols.begin(), free_cols.end(), std::size_t{0});
  std::int64_t remaining = result.total;
  // Fix rows in order, each to the smallest column that still admits an optimum.
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t sub_n = n - row - 1;
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
      const std::size_t col = free_cols[k];
      CostMatrix sub(sub_n);
      for (std::size_t r = 0; r < sub_n; ++r) {
        std::size_t c_out = 0;
        for (std::size_t c = 0; c < free_cols.size(); ++c) {
          if (c == k) continue;
          sub(r, c_out++) = cost(row + 1 + r, free_cols[c]);
        }
      }
      const std::int64_t rest = solve_assignment(sub).total;
      if (cost(row, col) + rest == remaining) {
        result.col_of_row[row] = col;
        remaining -= cost(row, col);
        free_cols.erase(free_cols.begin() + static_cast<std::ptrdiff_t>(k));
        break;
      }
    }
  }
  return result;
}

AssignmentResult solve_assignment_exhaustive(const CostMatrix& cost) {
  const std::size_t n = cost.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  AssignmentResult best;
  best.total = std::numeric_limits<std::int64_t>::max();
  do {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) total += cost(i, perm[i]);
    if (total < best.total) {
      best.total = total;
      best.col_of_row = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (n == 0) best.total = 0;
  return best;
}

}  // namespace glsc

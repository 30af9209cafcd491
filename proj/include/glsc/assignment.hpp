#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace glsc {

/// Dense square integer cost matrix, row-major.
class CostMatrix {
 public:
  explicit CostMatrix(std::size_t n) : n_(n), data_(n * n, 0) {}

  std::size_t size() const { return n_; }
  std::int64_t& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
  std::int64_t operator()(std::size_t row, std::size_t col) const {
    return data_[row * n_ + col];
  }

 private:
  std::size_t n_;
  std::vector<std::int64_t> data_;
};

struct AssignmentResult {
  std::int64_t total = 0;
  // col_of_row[i] is the column matched to row i.
  std::vector<std::size_t> col_of_row;
};

/// Minimum-cost perfect matching (Kuhn-Munkres with potentials, O(n^3)).
/// Any optimal matching may be returned.
AssignmentResult solve_assignment(const CostMatrix& cost);

/// Minimum-cost perfect matching whose col_of_row vector is
/// lexicographically smallest among all optimal matchings.
AssignmentResult solve_assignment_lexicographic(const CostMatrix& cost);

/// Exhaustive search over all n! permutations in lexicographic order; keeps the
/// first strict minimum, so ties resolve exactly as in
/// solve_assignment_lexicographic. Test oracle; use only for small n.
AssignmentResult solve_assignment_exhaustive(const CostMatrix& cost);

}  // namespace glsc

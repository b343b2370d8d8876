#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace tetra {

struct MaxVolOptions {
  /// Stop once no single row swap grows |det| by more than (1 + swap_tol).
  double swap_tol = 1e-2;
  /// Per start.
  std::size_t max_swaps = 100;
};

struct MaxVolResult {
  std::vector<std::size_t> row_indices;
  /// |det| of the selected r x r submatrix of the input (not the jittered copy).
  double volume = 0.0;
  std::size_t swap_count = 0;
  /// Set when the input was numerically rank deficient and jitter was added.
  bool regularized = false;
};

/**
 * Greedy maximum-volume row selection for a tall n x r matrix.
 *
 * Rows are seeded by Gaussian elimination with partial pivoting; the
 * coefficient matrix B = A * A(rows)^{-1} is then improved by single-row
 * swaps (the largest |B(i, j)| replaces row j) with a Sherman-Morrison
 * update per swap. This runs once per cyclic shift of the column order and
 * the largest volume is kept. On return every |B(i, j)| <= 1 + swap_tol
 * unless the swap budget ran out. `swap_count` sums over all starts.
 */
MaxVolResult maxvol(const Eigen::MatrixXd& m, const MaxVolOptions& options = {});

struct ElementBoundCheck {
  double j_hat_max = 0.0;  ///< max |entry| of the maxvol submatrix
  double j_max = 0.0;      ///< max |entry| of the whole matrix
  bool holds = false;      ///< j_hat_max * r^2 >= j_max
};

ElementBoundCheck maxvol_element_bound_check(const Eigen::MatrixXd& m,
                                             const MaxVolOptions& options = {});

}  // namespace tetra

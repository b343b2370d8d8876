#include "tetra/maxvol.hpp"

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "tetra/error.hpp"

namespace tetra {
namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kJitter = 1e-12;

// Rows picked by Gaussian elimination with partial pivoting. Returns false
// when a pivot falls below the relative tolerance.
bool pivot_rows(const Eigen::MatrixXd& m, std::vector<std::size_t>& rows) {
  const Eigen::Index n = m.rows();
  const Eigen::Index r = m.cols();
  const double scale = m.cwiseAbs().maxCoeff();
  Eigen::MatrixXd work = m;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  rows.clear();
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index best = -1;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double v = std::abs(work(i, j));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (best < 0 || !(best_abs > kPivotTol * scale) || scale == 0.0) return false;
    used[static_cast<std::size_t>(best)] = true;
    rows.push_back(static_cast<std::size_t>(best));
    const Eigen::RowVectorXd pivot_row = work.row(best) / work(best, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!used[static_cast<std::size_t>(i)]) work.row(i) -= work(i, j) * pivot_row;
    }
  }
  return true;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    sub.row(static_cast<Eigen::Index>(k)) = m.row(static_cast<Eigen::Index>(rows[k]));
  }
  return sub;
}

// Single-row swaps from `rows` until every |B(i, j)| <= 1 + swap_tol.
std::size_t swap_search(const Eigen::MatrixXd& a, std::vector<std::size_t>& rows,
                        const MaxVolOptions& options) {
  Eigen::MatrixXd b = a * select_rows(a, rows).partialPivLu().inverse();
  std::size_t swaps = 0;
  while (swaps < options.max_swaps) {
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    const double peak = b.cwiseAbs().maxCoeff(&i, &j);
    if (peak <= 1.0 + options.swap_tol) break;
    // Row i replaces selected row j; |det| grows by a factor |b(i, j)|.
    const double pivot = b(i, j);
    Eigen::RowVectorXd v = b.row(i);
    v(j) -= 1.0;
    const Eigen::VectorXd col = b.col(j) / pivot;
    b.noalias() -= col * v;
    rows[static_cast<std::size_t>(j)] = static_cast<std::size_t>(i);
    ++swaps;
  }
  return swaps;
}

}  // namespace

MaxVolResult maxvol(const Eigen::MatrixXd& m, const MaxVolOptions& options) {
  const Eigen::Index n = m.rows();
  const Eigen::Index r = m.cols();
  if (r < 1 || n < r) {
    throw InvalidArgument("maxvol: need n_rows >= r >= 1, got " + std::to_string(n) + "x" +
                          std::to_string(r));
  }
  if (!m.allFinite()) throw InvalidArgument("maxvol: non-finite input");

  MaxVolResult result;
  Eigen::MatrixXd a = m;
  std::vector<std::size_t> rows;
  if (!pivot_rows(a, rows)) {
    // Degenerate input: perturb deterministically so that the selection is
    // still well defined.
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    std::mt19937_64 rng(0x6d61787675ULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index j = 0; j < r; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) a(i, j) += kJitter * scale * u(rng);
    }
    result.regularized = true;
    if (!pivot_rows(a, rows)) {
      throw NumericalError("maxvol: input remains singular after regularization");
    }
  }

  // One start per cyclic shift of the column order; the largest volume wins.
  double best = -1.0;
  for (Eigen::Index shift = 0; shift < r; ++shift) {
    if (shift > 0) {
      Eigen::MatrixXd rotated(n, r);
      for (Eigen::Index j = 0; j < r; ++j) rotated.col(j) = a.col((j + shift) % r);
      if (!pivot_rows(rotated, rows)) continue;
    }
    const std::size_t swaps = swap_search(a, rows, options);
    const double vol = std::abs(select_rows(a, rows).determinant());
    result.swap_count += swaps;
    if (vol > best) {
      best = vol;
      result.row_indices = rows;
    }
  }

  result.volume = std::abs(select_rows(m, result.row_indices).determinant());
  return result;
}

ElementBoundCheck maxvol_element_bound_check(const Eigen::MatrixXd& m,
                                             const MaxVolOptions& options) {
  const MaxVolResult mv = maxvol(m, options);
  ElementBoundCheck out;
  out.j_max = m.cwiseAbs().maxCoeff();
  out.j_hat_max = select_rows(m, mv.row_indices).cwiseAbs().maxCoeff();
  const double r = static_cast<double>(m.cols());
  out.holds = out.j_hat_max * r * r >= out.j_max;
  return out;
}

}  // namespace tetra

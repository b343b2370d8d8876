#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tetra {

/// Zero-based position in a d-dimensional tensor; entry j lies in [0, n_j).
using MultiIndex = std::vector<std::size_t>;

/// Upper bound on the number of entries `tt_full` will materialize.
inline constexpr std::size_t kDefaultDenseCap = 1'000'000;

/// One 3-axis TT core of shape (left, mode, right), stored row-major so that
/// both the left unfolding (left*mode x right) and the right unfolding
/// (left x mode*right) are contiguous row-major matrices.
struct TtCore {
  std::size_t left = 1;
  std::size_t mode = 1;
  std::size_t right = 1;
  std::vector<double> data;

  TtCore() = default;
  TtCore(std::size_t l, std::size_t n, std::size_t r)
      : left(l), mode(n), right(r), data(l * n * r, 0.0) {}

  double& operator()(std::size_t a, std::size_t i, std::size_t b) {
    return data[(a * mode + i) * right + b];
  }
  double operator()(std::size_t a, std::size_t i, std::size_t b) const {
    return data[(a * mode + i) * right + b];
  }
};

/**
 * Tensor in tensor-train format:
 *
 *   A(i_1, ..., i_d) = G_1(:, i_1, :) G_2(:, i_2, :) ... G_d(:, i_d, :)
 *
 * with boundary ranks r_0 = r_d = 1. Values are immutable once built; every
 * operation below returns a new train.
 */
class TensorTrain {
 public:
  /// Validates the chain (boundary ranks, adjacent rank agreement, sizes).
  explicit TensorTrain(std::vector<TtCore> cores);

  /// Rank-1 train from one factor vector per dimension.
  static TensorTrain rank_one(const std::vector<std::vector<double>>& factors);

  /// Rank-1 train with every entry equal to `value`.
  static TensorTrain constant(std::span<const std::size_t> modes, double value);

  std::size_t order() const noexcept { return cores_.size(); }
  const std::vector<std::size_t>& mode_sizes() const noexcept { return modes_; }
  /// Bond ranks r_0..r_d.
  std::vector<std::size_t> ranks() const;
  /// Largest bond rank; this is what gets reported as "the rank".
  std::size_t max_rank() const;
  /// Number of stored parameters.
  std::size_t parameter_count() const;
  /// Product of mode sizes, saturating at SIZE_MAX.
  std::size_t dense_size() const;

  const TtCore& core(std::size_t k) const { return cores_.at(k); }
  const std::vector<TtCore>& cores() const noexcept { return cores_; }

  /// Throws InvalidArgument when `idx` has wrong length or an entry out of range.
  void check_index(std::span<const std::size_t> idx) const;

 private:
  std::vector<TtCore> cores_;
  std::vector<std::size_t> modes_;
};

/// Dense row-major tensor (last index fastest).
struct DenseTensor {
  std::vector<std::size_t> modes;
  std::vector<double> values;

  double at(std::span<const std::size_t> idx) const;
};

std::size_t flat_index(std::span<const std::size_t> modes, std::span<const std::size_t> idx);
MultiIndex unflatten_index(std::span<const std::size_t> modes, std::size_t flat);

double tt_eval(const TensorTrain& tt, std::span<const std::size_t> idx);

/// Dense materialization; throws SizeError past `cap` entries.
DenseTensor tt_full(const TensorTrain& tt, std::size_t cap = kDefaultDenseCap);

/// Elementwise product. Bond ranks multiply.
TensorTrain tt_hadamard(const TensorTrain& a, const TensorTrain& b);

/// Elementwise sum via block cores. Bond ranks add (interior bonds only).
TensorTrain tt_add(const TensorTrain& a, const TensorTrain& b);

TensorTrain tt_scale(const TensorTrain& tt, double factor);

/// Frobenius inner product computed core by core.
double tt_dot(const TensorTrain& a, const TensorTrain& b);
double tt_norm(const TensorTrain& tt);

/**
 * Right-to-left QR orthogonalization followed by a left-to-right truncated
 * SVD sweep. Each bond drops the smallest singular values while their tail
 * norm stays under rel_tol * |A|_F / sqrt(d - 1), then the bond is capped at
 * `max_rank`. rel_tol = 0 keeps every singular value, so ranks fall only to
 * the limits imposed by the mode sizes.
 */
TensorTrain tt_round(const TensorTrain& tt, std::size_t max_rank, double rel_tol);

enum class CoreDistribution { normal, uniform_positive };

/// Random train with bond ranks min(rank, prod of left modes, prod of right modes).
TensorTrain random_tensor_train(std::span<const std::size_t> modes, std::size_t rank,
                                std::uint64_t seed,
                                CoreDistribution dist = CoreDistribution::normal);

/// Text container: magic line "tetra-tt 1", then d, the mode sizes, the
/// ranks r_0..r_d, then every core's entries in (left, mode, right)
/// row-major order, printed with 17 significant digits.
void write_tensor_train(std::ostream& os, const TensorTrain& tt);
TensorTrain read_tensor_train(std::istream& is);

}  // namespace tetra

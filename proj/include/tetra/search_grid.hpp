#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tetra/objectives.hpp"
#include "tetra/tensor_train.hpp"

namespace tetra {

struct GridDim {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t points = 2;
};

/// Uniform grid over a box. Index k of a dimension maps to
/// lower + k (upper - lower) / (points - 1); index 0 and index points - 1
/// land exactly on the box faces. A dimension with a single point must have
/// lower == upper.
class SearchGrid {
 public:
  SearchGrid() = default;
  explicit SearchGrid(std::vector<GridDim> dims);

  /// Same point count on every dimension of `box`.
  static SearchGrid uniform(std::span<const Bounds> box, std::size_t points);

  std::size_t dimension() const noexcept { return dims_.size(); }
  const std::vector<GridDim>& dims() const noexcept { return dims_; }
  std::vector<std::size_t> shape() const;
  /// Total number of grid points (saturating).
  std::size_t size() const;

  double coordinate(std::size_t dim, std::size_t k) const;
  std::vector<double> point(std::span<const std::size_t> idx) const;

 private:
  std::vector<GridDim> dims_;
};

/// Real parameter vector of grid index `idx`; throws InvalidArgument when
/// the index is out of range.
std::vector<double> grid_point(const SearchGrid& grid, std::span<const std::size_t> idx);

}  // namespace tetra

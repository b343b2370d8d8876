#include "tetra/search_grid.hpp"

#include <limits>
#include <string>

#include "tetra/error.hpp"

namespace tetra {

SearchGrid::SearchGrid(std::vector<GridDim> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvalidArgument("search grid needs at least one dimension");
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    const GridDim& g = dims_[j];
    const std::string where = "grid dimension " + std::to_string(j);
    if (g.points < 1) throw InvalidArgument(where + ": points must be >= 1");
    if (g.points == 1 ? g.lower != g.upper : !(g.lower < g.upper)) {
      throw InvalidArgument(where + ": need lower < upper (or lower == upper with one point)");
    }
  }
}

SearchGrid SearchGrid::uniform(std::span<const Bounds> box, std::size_t points) {
  std::vector<GridDim> dims;
  for (const Bounds& b : box) dims.push_back({b.lower, b.upper, b.lower == b.upper ? 1 : points});
  return SearchGrid(std::move(dims));
}

std::vector<std::size_t> SearchGrid::shape() const {
  std::vector<std::size_t> s;
  for (const auto& g : dims_) s.push_back(g.points);
  return s;
}

std::size_t SearchGrid::size() const {
  std::size_t total = 1;
  for (const auto& g : dims_) {
    if (total > std::numeric_limits<std::size_t>::max() / g.points) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= g.points;
  }
  return total;
}

double SearchGrid::coordinate(std::size_t dim, std::size_t k) const {
  const GridDim& g = dims_.at(dim);
  if (k >= g.points) {
    throw InvalidArgument("grid index " + std::to_string(k) + " out of range for dimension " +
                          std::to_string(dim));
  }
  if (k == 0) return g.lower;
  if (k + 1 == g.points) return g.upper;
  const double t = static_cast<double>(k) / static_cast<double>(g.points - 1);
  return g.lower * (1.0 - t) + g.upper * t;
}

std::vector<double> SearchGrid::point(std::span<const std::size_t> idx) const {
  if (idx.size() != dims_.size()) {
    throw InvalidArgument("grid index has " + std::to_string(idx.size()) +
                          " entries, grid dimension is " + std::to_string(dims_.size()));
  }
  std::vector<double> x(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) x[j] = coordinate(j, idx[j]);
  return x;
}

std::vector<double> grid_point(const SearchGrid& grid, std::span<const std::size_t> idx) {
  return grid.point(idx);
}

}  // namespace tetra

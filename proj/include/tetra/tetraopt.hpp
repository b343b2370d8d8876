#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "tetra/eval_harness.hpp"
#include "tetra/objectives.hpp"
#include "tetra/search_grid.hpp"
#include "tetra/tensor_train.hpp"
#include "tetra/trace.hpp"
#include "tetra/tt_cross.hpp"

namespace tetra {

struct TetraOptConfig {
  SearchGrid grid;
  std::size_t rank = 4;
  /// Number of TT-cross passes; each is one left-to-right plus one
  /// right-to-left sweep from freshly drawn index sets.
  std::size_t iterations = 2;
  std::uint64_t seed = 0;
  bool minimize = true;
  std::size_t max_parallel = default_parallelism();
  MaxVolOptions maxvol{};
};

struct TetraOptResult {
  OptimizationTrace trace;
  MultiIndex best_index;
  /// Every evaluated grid point with its raw objective value (penalty for
  /// failures), in evaluation order; batch_id counts harness batches.
  SampleLog samples;
  std::size_t failures = 0;
  /// Approximation built by the last pass. It models the rescaled tensor the
  /// cross works on, in which larger entries mean better objective values.
  std::optional<TensorTrain> surrogate;
};

/**
 * Grid-based tensor-train optimizer.
 *
 * Every pass runs TT-cross over the grid tensor. Batches go through the
 * evaluation harness (memoized across passes, parallel within a batch).
 * Before values reach the cross they are mapped through
 *
 *   g(y) = pi/2 - atan((y - y_best) / scale)
 *
 * so that maxvol, which favours large-modulus entries, is steered towards
 * small objective values; `scale` is the median excess over the incumbent
 * within the batch. The incumbent is the smallest value seen over every
 * evaluated point, ties going to the lexicographically smallest index.
 * Maximization negates the objective; reported values are in the caller's
 * orientation.
 */
TetraOptResult tetraopt_minimize(const BlackBoxObjective& objective, const TetraOptConfig& config);

}  // namespace tetra

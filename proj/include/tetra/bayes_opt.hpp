#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tetra/gaussian_process.hpp"
#include "tetra/objectives.hpp"
#include "tetra/trace.hpp"

namespace tetra {

struct BayesConfig {
  std::size_t n_initial = 5;
  std::size_t n_iterations = 30;
  double kappa = 2.576;
  /// Search box; must match the objective dimension.
  std::vector<Bounds> bounds;
  std::uint64_t seed = 0;
  /// Kernel over inputs rescaled to the unit cube.
  Kernel kernel{KernelKind::matern52, 0.25, 1.0};
  /// Observation noise in standardized target units.
  double noise_variance = 1e-6;
  ProposeOptions propose{};
};

struct BayesObservation {
  std::vector<double> x;
  double value = 0.0;
  bool failed = false;
};

struct BayesResult {
  OptimizationTrace trace;
  std::vector<BayesObservation> observations;
};

/**
 * Sequential GP-UCB minimization: `n_initial` seeded uniform samples, then
 * `n_iterations` rounds of fit -> propose -> evaluate, one objective call per
 * round. The GP models the negated objective so that UCB maximization
 * searches for minima. Failed evaluations count as calls, get the penalty
 * in the trace bookkeeping, and enter the GP at the worst finite value seen.
 * A proposal that repeats an observed point is shifted by 1e-6 of the box.
 */
BayesResult bayes_minimize(const BlackBoxObjective& objective, const BayesConfig& config);

}  // namespace tetra

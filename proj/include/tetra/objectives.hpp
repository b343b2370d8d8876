#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tetra {

struct Bounds {
  double lower = 0.0;
  double upper = 1.0;
};

/// Scalar black box over a box-bounded domain. The evaluator may throw or
/// return a non-finite value to signal a failed evaluation; the batch
/// harness turns both into penalized, flagged results.
struct BlackBoxObjective {
  std::string name;
  std::vector<Bounds> bounds;
  std::function<double(std::span<const double>)> evaluator;

  std::size_t dimension() const noexcept { return bounds.size(); }
  /// Checks the dimension, then calls the evaluator.
  double operator()(std::span<const double> x) const;
};

// ---------------------------------------------------------------------------
// Coefficient of variation of a phase-fraction field on a cut plane.

/// Phase fractions m1 / (m1 + m2) sampled on a section; optional positive
/// weights (cell areas) turn mean and deviation into weighted statistics.
struct SectionField {
  std::vector<double> fractions;
  std::vector<double> weights;

  void validate() const;
};

/// sigma(f) / <f> with the population standard deviation.
/// Throws InvalidArgument for an empty or invalid field and NumericalError
/// when the mean is zero.
double cov(const SectionField& field);

/// CSV rows of `fraction[,weight]`; a non-numeric first line is a header.
/// Either every row carries a weight or none does.
SectionField read_section_field_csv(std::istream& is);

// ---------------------------------------------------------------------------
// Y-mixer surrogate.

/// Parameter order and box: y-angle [0, 30] deg, connection radius
/// [0.2, 0.5] mm, connection length [0.5, 1.5] mm, inlet radius [0.2, 0.6] mm.
std::vector<Bounds> mixer_bounds();
std::vector<std::string> mixer_parameter_names();

/// Lipschitz constant of the surrogate with respect to the Euclidean norm of
/// box-normalized coordinates (each parameter mapped to [0, 1]).
inline constexpr double kMixerLipschitz = 5.0;

/**
 * Analytic stand-in for the CFD mixing score. With a, c, l, s the y-angle,
 * connection radius, connection length and inlet radius mapped to [0, 1]:
 *
 *   f = 0.30
 *     - 0.273 exp(-((a-0.75)^2 + (l-0.25)^2) / (2 0.12^2)) exp(-q / (2 0.30^2))
 *     - 0.241 exp(-((a-0.25)^2 + (l-0.75)^2) / (2 0.15^2)) exp(-q / (2 0.35^2))
 *     + 0.35 q
 *     + 0.01 (1 - cos(4 pi (a + l)))
 *
 * where q = (c-0.25)^2 + (s-0.25)^2. The deep basin sits at the grid point
 * (22.5 deg, 0.275 mm, 0.75 mm, 0.3 mm) with f ~ 0.027, a shallower one at
 * (7.5 deg, 0.275 mm, 1.25 mm, 0.3 mm) with f ~ 0.059, and the cosine term
 * adds ridges between them. f > 0 on the whole box.
 *
 * Throws InvalidArgument outside the box.
 */
double mixer_surrogate(std::span<const double> p);

BlackBoxObjective mixer_objective();

// ---------------------------------------------------------------------------
// Standard test functions.

struct BenchmarkMinimum {
  std::vector<double> argmin;
  double value = 0.0;
};

/// Names: quadratic (sum (x_i - 0.3)^2 on [0, 1]^d), rosenbrock ([-2, 2]^d),
/// rastrigin ([-5.12, 5.12]^d), ackley ([-32.768, 32.768]^d).
BlackBoxObjective benchmark(const std::string& name, std::size_t dimension);
BenchmarkMinimum benchmark_minimum(const std::string& name, std::size_t dimension);

BlackBoxObjective quadratic_objective(std::vector<double> center, std::vector<Bounds> bounds);
BlackBoxObjective constant_objective(double value, std::vector<Bounds> bounds);

// ---------------------------------------------------------------------------
// Wrappers.

enum class LatencyKind {
  /// Wall-clock sleep: concurrent calls overlap freely, like jobs handed to
  /// an external cluster.
  sleep,
  /// Burns `delay` of thread CPU time: concurrent calls compete for cores,
  /// like a local CPU-bound solver.
  cpu,
};

BlackBoxObjective with_latency(BlackBoxObjective obj, double delay_s,
                               LatencyKind kind = LatencyKind::sleep);

/// Calls for which `fails(x)` is true throw EvaluationError instead of
/// returning a value.
BlackBoxObjective with_failures(BlackBoxObjective obj,
                                std::function<bool(std::span<const double>)> fails);

/// Fails a deterministic, seed-dependent fraction `rate` of input points.
BlackBoxObjective with_random_failures(BlackBoxObjective obj, double rate, std::uint64_t seed);

/// Busy-waits for `seconds` of CPU time on the calling thread.
void burn_cpu(double seconds);

}  // namespace tetra

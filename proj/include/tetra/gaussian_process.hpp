#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tetra/objectives.hpp"

namespace tetra {

enum class KernelKind { matern52, squared_exponential };

struct Kernel {
  KernelKind kind = KernelKind::matern52;
  double length_scale = 0.25;
  double signal_variance = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const;
};

struct GpPrediction {
  double mean = 0.0;
  double std = 0.0;
};

/// Zero-mean GP on standardized targets; predictions are mapped back to
/// the original scale.
class GaussianProcessModel {
 public:
  std::size_t size() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  std::size_t input_dimension() const noexcept { return static_cast<std::size_t>(x_.cols()); }
  const Kernel& kernel() const noexcept { return kernel_; }
  double noise_variance() const noexcept { return noise_; }
  /// Extra diagonal added to reach a successful Cholesky factorization.
  double jitter() const noexcept { return jitter_; }
  double target_mean() const noexcept { return y_mean_; }
  double target_scale() const noexcept { return y_scale_; }

  GpPrediction predict(std::span<const double> x) const;

 private:
  friend GaussianProcessModel gp_fit(const std::vector<std::vector<double>>&,
                                     const std::vector<double>&, const Kernel&, double);

  Eigen::MatrixXd x_;
  Kernel kernel_;
  double noise_ = 0.0;
  double jitter_ = 0.0;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
};

/// Fits the posterior. Targets are standardized (zero mean, unit population
/// variance; a constant target keeps scale 1). When the Cholesky factor
/// fails, jitter 1e-10, 1e-9, ..., 1e-6 is tried before giving up with
/// NumericalError.
GaussianProcessModel gp_fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                            const Kernel& kernel, double noise_variance);

GpPrediction gp_predict(const GaussianProcessModel& model, std::span<const double> x);

/// m(x) + kappa * sigma(x), maximization convention.
double acquisition_ucb(const GaussianProcessModel& model, std::span<const double> x, double kappa);

struct ProposeOptions {
  std::size_t samples = 2048;
  std::size_t refine_rounds = 3;
  /// Initial coordinate step as a fraction of the box width; quartered each round.
  double initial_step = 0.05;
};

/// Approximate UCB argmax: best of `samples` seeded uniform draws, then
/// coordinate search with a shrinking step.
std::vector<double> propose_next(const GaussianProcessModel& model, std::span<const Bounds> bounds,
                                 double kappa, std::uint64_t seed, const ProposeOptions& options = {});

}  // namespace tetra

#include "tetra/gaussian_process.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tetra/error.hpp"

namespace tetra {

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
  double d2 = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d2 += (a[j] - b[j]) * (a[j] - b[j]);
  switch (kind) {
    case KernelKind::squared_exponential:
      return signal_variance * std::exp(-0.5 * d2 / (length_scale * length_scale));
    case KernelKind::matern52: {
      const double r = std::sqrt(5.0 * d2) / length_scale;
      return signal_variance * (1.0 + r + r * r / 3.0) * std::exp(-r);
    }
  }
  return 0.0;
}

GaussianProcessModel gp_fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                            const Kernel& kernel, double noise_variance) {
  if (x.empty()) throw InvalidArgument("gp_fit: need at least one observation");
  if (x.size() != y.size()) throw InvalidArgument("gp_fit: x and y differ in length");
  if (!(kernel.length_scale > 0.0) || !(kernel.signal_variance > 0.0)) {
    throw InvalidArgument("gp_fit: kernel length scale and signal variance must be positive");
  }
  if (!(noise_variance >= 0.0)) throw InvalidArgument("gp_fit: noise variance must be >= 0");
  const std::size_t n = x.size();
  const std::size_t dim = x.front().size();

  GaussianProcessModel model;
  model.kernel_ = kernel;
  model.noise_ = noise_variance;
  model.x_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t p = 0; p < n; ++p) {
    if (x[p].size() != dim) throw InvalidArgument("gp_fit: inconsistent input dimension");
    for (std::size_t j = 0; j < dim; ++j) {
      if (!std::isfinite(x[p][j])) throw InvalidArgument("gp_fit: non-finite input");
      model.x_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) = x[p][j];
    }
    if (!std::isfinite(y[p])) throw InvalidArgument("gp_fit: non-finite target");
  }

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);
  model.y_mean_ = mean;
  model.y_scale_ = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;

  Eigen::VectorXd ys(static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) ys(static_cast<Eigen::Index>(p)) = (y[p] - mean) / model.y_scale_;

  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q <= p; ++q) {
      const double v = kernel(x[p], x[q]);
      k(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = v;
      k(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = v;
    }
  }
  const auto diag = Eigen::MatrixXd::Identity(k.rows(), k.cols());

  const auto try_factor = [&](double jitter) {
    model.chol_.compute(k + (noise_variance + jitter) * diag);
    if (model.chol_.info() != Eigen::Success) return false;
    const auto l = model.chol_.matrixLLT().diagonal();
    return (l.array() > 0.0).all() && l.allFinite();
  };
  bool ok = try_factor(0.0);
  for (double jitter = 1e-10; !ok && jitter <= 1e-6 * 1.0001; jitter *= 10.0) {
    ok = try_factor(jitter);
    if (ok) model.jitter_ = jitter;
  }
  if (!ok) throw NumericalError("gp_fit: kernel matrix is singular even with 1e-6 jitter");
  model.alpha_ = model.chol_.solve(ys);
  return model;
}

GpPrediction GaussianProcessModel::predict(std::span<const double> x) const {
  if (x_.rows() == 0) throw InvalidArgument("gp_predict: model is not fitted");
  if (x.size() != input_dimension()) throw InvalidArgument("gp_predict: input dimension mismatch");
  const Eigen::Index n = x_.rows();
  Eigen::VectorXd ks(n);
  std::vector<double> row(input_dimension());
  for (Eigen::Index p = 0; p < n; ++p) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = x_(p, static_cast<Eigen::Index>(j));
    ks(p) = kernel_(x, row);
  }
  const double mean_s = ks.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(ks);
  const double var_s = kernel_(x, x) - v.squaredNorm();
  GpPrediction out;
  out.mean = y_mean_ + y_scale_ * mean_s;
  out.std = y_scale_ * std::sqrt(std::max(var_s, 0.0));
  return out;
}

GpPrediction gp_predict(const GaussianProcessModel& model, std::span<const double> x) {
  return model.predict(x);
}

double acquisition_ucb(const GaussianProcessModel& model, std::span<const double> x, double kappa) {
  const GpPrediction p = model.predict(x);
  return p.mean + kappa * p.std;
}

std::vector<double> propose_next(const GaussianProcessModel& model, std::span<const Bounds> bounds,
                                 double kappa, std::uint64_t seed, const ProposeOptions& options) {
  if (bounds.size() != model.input_dimension()) {
    throw InvalidArgument("propose_next: bounds dimension mismatch");
  }
  for (const Bounds& b : bounds) {
    if (!(b.lower <= b.upper)) throw InvalidArgument("propose_next: invalid bounds");
  }
  const std::size_t dim = bounds.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> best(dim);
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<double> x(dim);
  for (std::size_t s = 0; s < std::max<std::size_t>(options.samples, 1); ++s) {
    for (std::size_t j = 0; j < dim; ++j) {
      x[j] = bounds[j].lower + unit(rng) * (bounds[j].upper - bounds[j].lower);
    }
    const double score = acquisition_ucb(model, x, kappa);
    if (score > best_score) {
      best_score = score;
      best = x;
    }
  }

  double frac = options.initial_step;
  for (std::size_t round = 0; round < options.refine_rounds; ++round, frac *= 0.25) {
    bool moved = true;
    for (int pass = 0; moved && pass < 20; ++pass) {
      moved = false;
      for (std::size_t j = 0; j < dim; ++j) {
        const double step = frac * (bounds[j].upper - bounds[j].lower);
        if (step <= 0.0) continue;
        for (double dir : {1.0, -1.0}) {
          x = best;
          x[j] = std::clamp(best[j] + dir * step, bounds[j].lower, bounds[j].upper);
          const double score = acquisition_ucb(model, x, kappa);
          if (score > best_score) {
            best_score = score;
            best = x;
            moved = true;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace tetra

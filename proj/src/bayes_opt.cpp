#include "tetra/bayes_opt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "tetra/error.hpp"
#include "tetra/eval_harness.hpp"
#include "tetra/seeding.hpp"

namespace tetra {
namespace {

constexpr double kDuplicateTol = 1e-12;
constexpr double kDuplicateShift = 1e-6;

std::vector<double> from_unit(std::span<const double> u, std::span<const Bounds> box) {
  std::vector<double> x(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double w = box[j].upper - box[j].lower;
    x[j] = w > 0.0 ? std::clamp(box[j].lower + u[j] * w, box[j].lower, box[j].upper) : box[j].lower;
  }
  return x;
}

}  // namespace

BayesResult bayes_minimize(const BlackBoxObjective& objective, const BayesConfig& config) {
  if (config.n_initial < 1) throw InvalidArgument("bayes: n_initial must be >= 1");
  if (!(config.kappa >= 0.0)) throw InvalidArgument("bayes: kappa must be >= 0");
  if (config.bounds.size() != objective.dimension()) {
    throw InvalidArgument("bayes: bounds dimension " + std::to_string(config.bounds.size()) +
                          " differs from objective dimension " +
                          std::to_string(objective.dimension()));
  }
  for (const Bounds& b : config.bounds) {
    if (!(b.lower <= b.upper)) throw InvalidArgument("bayes: invalid bounds");
  }
  const std::size_t dim = config.bounds.size();
  const std::vector<Bounds> unit_box(dim, Bounds{0.0, 1.0});

  BayesResult result;
  result.trace.optimizer = "bayes";
  std::vector<std::vector<double>> unit_points;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  const auto start = std::chrono::steady_clock::now();

  const auto evaluate = [&](std::vector<double> u) {
    std::vector<double> x = from_unit(u, config.bounds);
    const Evaluation e = evaluate_point(objective, x);
    if (!e.failed && e.value < best) {
      best = e.value;
      best_x = x;
    }
    unit_points.push_back(std::move(u));
    result.observations.push_back({std::move(x), e.value, e.failed});
    TraceEvent event;
    event.calls = result.observations.size();
    event.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    event.best_value = best;
    event.best_point = best_x;
    result.trace.events.push_back(std::move(event));
  };

  std::mt19937_64 rng(derive_seed(config.seed, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < config.n_initial; ++k) {
    std::vector<double> u(dim);
    for (double& v : u) v = unit(rng);
    evaluate(std::move(u));
  }

  for (std::size_t t = 0; t < config.n_iterations; ++t) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& o : result.observations) {
      if (!o.failed) worst = std::max(worst, o.value);
    }
    std::vector<double> u;
    if (std::isfinite(worst)) {
      std::vector<double> targets;
      for (const auto& o : result.observations) targets.push_back(-(o.failed ? worst : o.value));
      const GaussianProcessModel model = gp_fit(unit_points, targets, config.kernel,
                                                config.noise_variance);
      u = propose_next(model, unit_box, config.kappa, derive_seed(config.seed, t + 1),
                       config.propose);
      const bool duplicate = std::any_of(unit_points.begin(), unit_points.end(), [&](const auto& p) {
        for (std::size_t j = 0; j < dim; ++j) {
          if (std::abs(p[j] - u[j]) > kDuplicateTol) return false;
        }
        return true;
      });
      if (duplicate) {
        for (double& v : u) v = v + kDuplicateShift <= 1.0 ? v + kDuplicateShift : v - kDuplicateShift;
      }
    } else {
      // Nothing usable to model yet.
      u.resize(dim);
      for (double& v : u) v = unit(rng);
    }
    evaluate(std::move(u));
  }

  result.trace.total_calls = result.observations.size();
  result.trace.total_runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace tetra

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tetra/bayes_opt.hpp"
#include "tetra/error.hpp"

using namespace tetra;

namespace {

BayesConfig defaults(const std::vector<Bounds>& box, std::uint64_t seed) {
  BayesConfig cfg;
  cfg.bounds = box;
  cfg.seed = seed;
  return cfg;
}

std::string csv_without_timing(const OptimizationTrace& t) {
  std::ostringstream os;
  TraceCsvOptions opts;
  opts.include_timing = false;
  write_trace_csv(os, t, opts);
  return os.str();
}

}  // namespace

TEST_CASE("one-dimensional quadratic") {
  const std::vector<Bounds> box{{0.0, 1.0}};
  const BlackBoxObjective q = quadratic_objective({0.3}, box);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BayesResult r = bayes_minimize(q, defaults(box, seed));
    CHECK(r.observations.size() == 35);
    CHECK(r.trace.events.size() == 35);
    CHECK(r.trace.total_calls == 35);
    if (r.trace.best_value() <= 1e-2) ++good;
    for (std::size_t k = 1; k < r.trace.events.size(); ++k) {
      CHECK(r.trace.events[k].best_value <= r.trace.events[k - 1].best_value);
      CHECK(r.trace.events[k].calls == k + 1);
    }
  }
  CHECK(good >= 8);
}

TEST_CASE("constant objective") {
  const std::vector<Bounds> box{{0.0, 1.0}, {0.0, 1.0}};
  BayesConfig cfg = defaults(box, 3);
  const BayesResult r = bayes_minimize(constant_objective(4.5, box), cfg);
  CHECK(r.trace.events[cfg.n_initial - 1].best_value == 4.5);
  CHECK(r.trace.best_value() == 4.5);
}

TEST_CASE("mixer with the paper configuration uses 35 calls") {
  const BayesResult r = bayes_minimize(mixer_objective(), defaults(mixer_bounds(), 0));
  CHECK(r.trace.total_calls == 35);
  for (const BayesObservation& o : r.observations) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(o.x[j] >= mixer_bounds()[j].lower);
      CHECK(o.x[j] <= mixer_bounds()[j].upper);
    }
  }
}

TEST_CASE("deterministic per seed") {
  const BlackBoxObjective f = benchmark("rosenbrock", 2);
  const BayesResult a = bayes_minimize(f, defaults(f.bounds, 9));
  const BayesResult b = bayes_minimize(f, defaults(f.bounds, 9));
  CHECK(csv_without_timing(a.trace) == csv_without_timing(b.trace));
  const BayesResult c = bayes_minimize(f, defaults(f.bounds, 10));
  CHECK(csv_without_timing(a.trace) != csv_without_timing(c.trace));
}

TEST_CASE("degenerate box repeats one point without breaking the fit") {
  const std::vector<Bounds> box{{0.3, 0.3}};
  const BayesResult r = bayes_minimize(quadratic_objective({0.1}, box), defaults(box, 0));
  CHECK(r.observations.size() == 35);
  for (const BayesObservation& o : r.observations) CHECK(o.x[0] == 0.3);
  CHECK(r.trace.best_value() == doctest::Approx(0.04));
}

TEST_CASE("failures are counted but never incumbents") {
  const std::vector<Bounds> box{{0.0, 1.0}};
  const BlackBoxObjective q = quadratic_objective({0.3}, box);
  const BlackBoxObjective broken = with_failures(q, [](std::span<const double> x) { return x[0] < 0.5; });
  const BayesResult r = bayes_minimize(broken, defaults(box, 1));
  CHECK(r.observations.size() == 35);
  bool any_failed = false;
  for (const BayesObservation& o : r.observations) {
    any_failed = any_failed || o.failed;
    if (o.failed) CHECK(o.value == 1e30);
  }
  CHECK(any_failed);
  CHECK(r.trace.best_point()[0] >= 0.5);
  CHECK(r.trace.best_value() == doctest::Approx(0.04).epsilon(0.05));
}

TEST_CASE("argument checks") {
  const BlackBoxObjective q = benchmark("quadratic", 2);
  BayesConfig cfg = defaults({{0, 1}}, 0);
  CHECK_THROWS_AS(bayes_minimize(q, cfg), InvalidArgument);
  cfg.bounds = q.bounds;
  cfg.n_initial = 0;
  CHECK_THROWS_AS(bayes_minimize(q, cfg), InvalidArgument);
  cfg.n_initial = 1;
  cfg.kappa = -1;
  CHECK_THROWS_AS(bayes_minimize(q, cfg), InvalidArgument);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tetra/error.hpp"
#include "tetra/tetraopt.hpp"

using namespace tetra;

namespace {

TetraOptConfig paper_config(const std::vector<Bounds>& box, std::uint64_t seed) {
  TetraOptConfig cfg;
  cfg.grid = SearchGrid::uniform(box, 5);
  cfg.rank = 4;
  cfg.iterations = 2;
  cfg.seed = seed;
  cfg.max_parallel = 4;
  return cfg;
}

// Brute-force minimum over every grid point.
double grid_minimum(const BlackBoxObjective& obj, const SearchGrid& grid) {
  double best = std::numeric_limits<double>::infinity();
  const auto shape = grid.shape();
  for (std::size_t f = 0; f < grid.size(); ++f) best = std::min(best, obj(grid.point(unflatten_index(shape, f))));
  return best;
}

std::string csv_without_timing(const OptimizationTrace& t) {
  std::ostringstream os;
  TraceCsvOptions opts;
  opts.include_timing = false;
  write_trace_csv(os, t, opts);
  return os.str();
}

}  // namespace

TEST_CASE("constant objective") {
  const std::vector<Bounds> box(3, Bounds{0.0, 1.0});
  const TetraOptResult r = tetraopt_minimize(constant_objective(7.0, box), paper_config(box, 1));
  CHECK(r.trace.best_value() == 7.0);
  // Ties resolve to the lexicographically smallest sampled index.
  MultiIndex smallest = r.samples.entries.front().index;
  for (const auto& e : r.samples.entries) smallest = std::min(smallest, e.index);
  CHECK(r.best_index == smallest);
}

TEST_CASE("separable quadratic with on-grid center") {
  const std::vector<Bounds> box(4, Bounds{0.0, 1.0});
  const BlackBoxObjective q = quadratic_objective({0.25, 0.75, 0.5, 0.0}, box);
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TetraOptResult r = tetraopt_minimize(q, paper_config(box, seed));
    if (r.trace.best_value() == 0.0) ++exact;
  }
  CHECK(exact >= 9);
}

TEST_CASE("mixer surrogate versus the exhaustive grid minimum") {
  std::ifstream in(std::string(TETRA_FIXTURE_DIR) + "/mixer_grid_minimum.txt");
  std::size_t i0, i1, i2, i3;
  double fixture_min;
  in >> i0 >> i1 >> i2 >> i3 >> fixture_min;
  REQUIRE(in);
  const BlackBoxObjective mixer = mixer_objective();
  CHECK(grid_minimum(mixer, SearchGrid::uniform(mixer_bounds(), 5)) == doctest::Approx(fixture_min).epsilon(1e-12));
  int close = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TetraOptResult r = tetraopt_minimize(mixer, paper_config(mixer_bounds(), seed));
    if (r.trace.best_value() <= fixture_min * 1.05) ++close;
  }
  CHECK(close >= 9);
}

TEST_CASE("trace invariants") {
  const std::vector<std::size_t> dims{2, 3, 4};
  for (std::size_t d : dims) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const BlackBoxObjective f = benchmark("rastrigin", d);
      TetraOptConfig cfg;
      cfg.grid = SearchGrid::uniform(f.bounds, 7);
      cfg.rank = 3;
      cfg.iterations = 2;
      cfg.seed = seed;
      const TetraOptResult r = tetraopt_minimize(f, cfg);

      for (std::size_t k = 1; k < r.trace.events.size(); ++k) {
        CHECK(r.trace.events[k].best_value <= r.trace.events[k - 1].best_value);
        CHECK(r.trace.events[k].calls >= r.trace.events[k - 1].calls);
        CHECK(r.trace.events[k].wall_time_s >= r.trace.events[k - 1].wall_time_s);
      }
      CHECK(r.trace.total_calls == r.samples.unique_count());
      CHECK(r.trace.total_calls <= 2 * cfg.iterations * d * 7 * cfg.rank * cfg.rank);

      double sampled_min = std::numeric_limits<double>::infinity();
      for (const auto& e : r.samples.entries) sampled_min = std::min(sampled_min, e.value);
      CHECK(r.trace.best_value() == sampled_min);
      CHECK(f(r.trace.best_point()) == r.trace.best_value());
      CHECK(r.trace.best_point() == cfg.grid.point(r.best_index));
    }
  }
}

TEST_CASE("deterministic traces") {
  const BlackBoxObjective mixer = mixer_objective();
  for (std::uint64_t seed : {0u, 3u}) {
    TetraOptConfig a = paper_config(mixer_bounds(), seed);
    TetraOptConfig b = a;
    a.max_parallel = 1;
    b.max_parallel = 6;
    CHECK(csv_without_timing(tetraopt_minimize(mixer, a).trace) ==
          csv_without_timing(tetraopt_minimize(mixer, b).trace));
  }
}

TEST_CASE("failed evaluations never become the incumbent") {
  const std::vector<Bounds> box(3, Bounds{0.0, 1.0});
  const BlackBoxObjective q = quadratic_objective({0.5, 0.5, 0.5}, box);
  // The true optimum and a quarter of the other points fail.
  BlackBoxObjective broken = with_failures(q, [](std::span<const double> x) {
    return std::abs(x[0] - 0.5) + std::abs(x[1] - 0.5) + std::abs(x[2] - 0.5) < 1e-12;
  });
  broken = with_random_failures(broken, 0.25, 9);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TetraOptResult r = tetraopt_minimize(broken, paper_config(box, seed));
    CHECK(r.failures > 0);
    CHECK(r.trace.best_value() > 0.0);
    CHECK(r.trace.best_value() < 1.0);
    double worst_ok = 0.0;
    std::size_t flagged = 0;
    for (const auto& e : r.samples.entries) {
      if (e.value == kFailurePenalty) {
        ++flagged;
      } else {
        worst_ok = std::max(worst_ok, e.value);
      }
    }
    CHECK(flagged == r.failures);
    CHECK(worst_ok < kFailurePenalty);
  }

  BlackBoxObjective all_bad = q;
  all_bad.evaluator = [](std::span<const double>) -> double { throw EvaluationError("down"); };
  const TetraOptResult none = tetraopt_minimize(all_bad, paper_config(box, 0));
  CHECK(none.trace.best_value() == std::numeric_limits<double>::infinity());
  CHECK(none.best_index.empty());
}

TEST_CASE("maximization reports values in the caller's orientation") {
  const std::vector<Bounds> box(2, Bounds{0.0, 1.0});
  BlackBoxObjective bump = quadratic_objective({0.5, 0.5}, box);
  bump.evaluator = [](std::span<const double> x) {
    return 1.0 - (x[0] - 0.5) * (x[0] - 0.5) - (x[1] - 0.5) * (x[1] - 0.5);
  };
  TetraOptConfig cfg = paper_config(box, 2);
  cfg.minimize = false;
  const TetraOptResult r = tetraopt_minimize(bump, cfg);
  CHECK(r.trace.best_value() == 1.0);
  CHECK(r.trace.best_point() == std::vector<double>{0.5, 0.5});
  for (const auto& e : r.samples.entries) CHECK(e.value <= 1.0);
}

TEST_CASE("invalid configurations") {
  const std::vector<Bounds> box(2, Bounds{0.0, 1.0});
  const BlackBoxObjective q = benchmark("quadratic", 3);
  CHECK_THROWS_AS(tetraopt_minimize(q, paper_config(box, 0)), InvalidArgument);
  TetraOptConfig cfg = paper_config(q.bounds, 0);
  cfg.rank = 0;
  CHECK_THROWS_AS(tetraopt_minimize(q, cfg), InvalidArgument);
  cfg.rank = 2;
  cfg.iterations = 0;
  CHECK_THROWS_AS(tetraopt_minimize(q, cfg), InvalidArgument);
}

TEST_CASE("single-point grid") {
  const std::vector<Bounds> box{{0.3, 0.3}};
  TetraOptConfig cfg;
  cfg.grid = SearchGrid({{0.3, 0.3, 1}});
  const TetraOptResult r = tetraopt_minimize(quadratic_objective({0.1}, box), cfg);
  CHECK(r.trace.best_value() == doctest::Approx(0.04));
  CHECK(r.trace.total_calls == 1);
}

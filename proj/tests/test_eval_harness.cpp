#include <doctest.h>

#include <atomic>
#include <chrono>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "tetra/error.hpp"
#include "tetra/eval_harness.hpp"

using namespace tetra;

namespace {

BatchRequest line_request(std::size_t n, std::size_t stride = 1) {
  BatchRequest r;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (k * stride) % n;
    r.indices.push_back(MultiIndex{i});
    r.points.push_back({static_cast<double>(i) / static_cast<double>(n)});
  }
  return r;
}

BlackBoxObjective counting(std::atomic<int>& calls) {
  BlackBoxObjective obj = benchmark("quadratic", 1);
  const auto inner = obj.evaluator;
  obj.evaluator = [&calls, inner](std::span<const double> x) {
    ++calls;
    return inner(x);
  };
  return obj;
}

}  // namespace

TEST_CASE("duplicates are evaluated once") {
  std::atomic<int> calls{0};
  const BlackBoxObjective obj = counting(calls);
  BatchRequest r;
  for (double x : {0.1, 0.2, 0.1, 0.3, 0.2, 0.1}) {
    r.indices.push_back(MultiIndex{static_cast<std::size_t>(x * 10)});
    r.points.push_back({x});
  }
  const BatchResult res = evaluate_batch(obj, r, 4);
  CHECK(calls == 3);
  CHECK(res.evaluated == 3);
  CHECK(res.served_from_cache == 3);
  for (std::size_t p = 0; p < r.points.size(); ++p) CHECK(res.values[p] == obj(r.points[p]));
  CHECK(res.wall_time_s >= 0.0);
}

TEST_CASE("cache is shared across batches") {
  std::atomic<int> calls{0};
  const BlackBoxObjective obj = counting(calls);
  EvalCache cache;
  std::set<std::size_t> unique;
  std::mt19937_64 rng(3);
  for (std::size_t b = 0; b < 20; ++b) {
    BatchRequest r;
    r.batch_id = b;
    for (int k = 0; k < 15; ++k) {
      const std::size_t i = rng() % 40;
      unique.insert(i);
      r.indices.push_back(MultiIndex{i});
      r.points.push_back({static_cast<double>(i) / 40.0});
    }
    evaluate_batch(obj, r, 3, cache);
  }
  CHECK(static_cast<std::size_t>(calls.load()) == unique.size());
  CHECK(cache.size() == unique.size());
}

TEST_CASE("parallel sleep latency overlaps") {
  const BlackBoxObjective slow = with_latency(benchmark("quadratic", 1), 0.05);
  const BatchResult serial = evaluate_batch(slow, line_request(8), 1);
  const double serial_per_point = serial.wall_time_s / 8.0;
  CHECK(serial.wall_time_s >= 0.4);

  const BatchResult par = evaluate_batch(slow, line_request(32), 8);
  MESSAGE("serial per point " << serial_per_point << " s, parallel batch " << par.wall_time_s << " s");
  CHECK(par.wall_time_s / 32.0 <= 0.3 * serial_per_point);
  CHECK(par.wall_time_s >= 0.2);
  CHECK(par.wall_time_s <= 0.4);
}

TEST_CASE("failure isolation") {
  const BlackBoxObjective base = benchmark("quadratic", 1);
  const BlackBoxObjective one_bad = with_failures(base, [](std::span<const double> x) {
    return std::abs(x[0] - 0.5) < 1e-12;
  });
  const BatchRequest r = line_request(10);
  const BatchResult res = evaluate_batch(one_bad, r, 4);
  REQUIRE(res.failures.size() == 1);
  const std::size_t bad = res.failures.front();
  CHECK(r.points[bad][0] == 0.5);
  CHECK(res.values[bad] == kFailurePenalty);
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    if (p != bad) CHECK(res.values[p] == base(r.points[p]));
  }

  BlackBoxObjective nan_obj = base;
  nan_obj.evaluator = [](std::span<const double>) { return std::nan(""); };
  const Evaluation e = evaluate_point(nan_obj, std::vector<double>{0.1});
  CHECK(e.failed);
  CHECK(e.value == kFailurePenalty);

  BlackBoxObjective odd = base;
  odd.evaluator = [](std::span<const double>) -> double { throw 42; };
  CHECK(evaluate_point(odd, std::vector<double>{0.1}).failed);
}

TEST_CASE("results do not depend on completion order") {
  BlackBoxObjective jittery = benchmark("quadratic", 1);
  const auto inner = jittery.evaluator;
  jittery.evaluator = [inner](std::span<const double> x) {
    // Delay pattern scrambles completion order relative to request order.
    const auto us = static_cast<int>(std::fmod(x[0] * 7919.0, 1.0) * 3000.0);
    std::this_thread::sleep_for(std::chrono::microseconds(us));
    return inner(x);
  };
  const BatchRequest r = line_request(24, 5);
  const BatchResult reference = evaluate_batch(jittery, r, 1);
  for (std::size_t par : {2u, 5u, 24u}) {
    CHECK(evaluate_batch(jittery, r, par).values == reference.values);
  }
}

TEST_CASE("argument checks") {
  const BlackBoxObjective obj = benchmark("quadratic", 1);
  CHECK_THROWS_AS(evaluate_batch(obj, line_request(3), 0), InvalidArgument);
  BatchRequest bad = line_request(3);
  bad.points.pop_back();
  CHECK_THROWS_AS(evaluate_batch(obj, bad, 1), InvalidArgument);
  CHECK(default_parallelism() >= 1);
}

TEST_CASE("scaling report") {
  const BlackBoxObjective slow = with_latency(benchmark("quadratic", 2), 0.02);
  const std::vector<std::size_t> levels{1, 2, 4, 8};
  const std::vector<ScalingRow> rows = parallel_scaling_report(slow, 16, levels);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].parallelism == 1);
  CHECK(rows[0].effective_time_per_eval_s == doctest::Approx(0.02).epsilon(0.2));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].effective_time_per_eval_s <= rows[k - 1].effective_time_per_eval_s * 1.15);
  }
  std::ostringstream os;
  write_scaling_csv(os, rows);
  CHECK(os.str().rfind("parallelism,effective_time_per_eval_s\n1,", 0) == 0);
  const std::vector<std::size_t> zero{0};
  CHECK_THROWS_AS(parallel_scaling_report(slow, 4, zero), InvalidArgument);
}

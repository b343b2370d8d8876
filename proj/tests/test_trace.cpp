#include <doctest.h>

#include <limits>
#include <sstream>

#include "tetra/trace.hpp"

using namespace tetra;

namespace {

OptimizationTrace sample_trace() {
  OptimizationTrace t;
  t.optimizer = "demo";
  t.events.push_back({4, 0.5, 3.0, {0.1, 0.2}});
  t.events.push_back({9, 1.0, 2.0, {0.3, 0.4}});
  t.events.push_back({12, 2.0, 0.5, {0.25, 1.0}});
  t.total_calls = 12;
  t.total_runtime_s = 2.0;
  return t;
}

}  // namespace

TEST_CASE("incumbent lookup") {
  const OptimizationTrace t = sample_trace();
  CHECK(t.best_value() == 0.5);
  CHECK(t.best_point() == std::vector<double>{0.25, 1.0});
  CHECK(t.best_value_at(0.1) == std::numeric_limits<double>::infinity());
  CHECK(t.best_value_at(0.5) == 3.0);
  CHECK(t.best_value_at(1.5) == 2.0);
  CHECK(t.best_value_at(10.0) == 0.5);
  CHECK(OptimizationTrace{}.best_value() == std::numeric_limits<double>::infinity());
  CHECK(OptimizationTrace{}.best_point().empty());
}

TEST_CASE("csv golden output") {
  std::ostringstream with_time;
  write_trace_csv(with_time, sample_trace());
  CHECK(with_time.str() ==
        "calls,wall_time_s,best_value,x0,x1\n"
        "4,0.5,3,0.10000000000000001,0.20000000000000001\n"
        "9,1,2,0.29999999999999999,0.40000000000000002\n"
        "12,2,0.5,0.25,1\n");

  std::ostringstream no_time;
  TraceCsvOptions opts;
  opts.include_timing = false;
  opts.parameter_names = {"a", "b"};
  write_trace_csv(no_time, sample_trace(), opts);
  CHECK(no_time.str().rfind("calls,best_value,a,b\n4,3,", 0) == 0);

  std::ostringstream empty;
  write_trace_csv(empty, OptimizationTrace{}, opts);
  CHECK(empty.str() == "calls,best_value,a,b\n");
}

#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace tetra {

/// Incumbent snapshot taken when a batch of evaluations completes.
struct TraceEvent {
  std::size_t calls = 0;  ///< unique objective calls so far
  double wall_time_s = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_point;
};

struct OptimizationTrace {
  std::string optimizer;
  std::vector<TraceEvent> events;
  std::size_t total_calls = 0;
  double total_runtime_s = 0.0;

  double best_value() const;
  const std::vector<double>& best_point() const;
  /// Incumbent value at wall time `t` (+inf before the first event).
  double best_value_at(double t) const;
};

struct TraceCsvOptions {
  bool include_timing = true;
  /// Parameter column names; defaults to x0, x1, ...
  std::vector<std::string> parameter_names;
};

/// Columns: calls,wall_time_s,best_value, then one column per parameter.
/// Values are printed with 17 significant digits.
void write_trace_csv(std::ostream& os, const OptimizationTrace& trace,
                     const TraceCsvOptions& options = {});

}  // namespace tetra

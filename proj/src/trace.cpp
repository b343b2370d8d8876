#include "tetra/trace.hpp"

#include <ostream>
#include <sstream>

namespace tetra {

double OptimizationTrace::best_value() const {
  return events.empty() ? std::numeric_limits<double>::infinity() : events.back().best_value;
}

const std::vector<double>& OptimizationTrace::best_point() const {
  static const std::vector<double> empty;
  return events.empty() ? empty : events.back().best_point;
}

double OptimizationTrace::best_value_at(double t) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : events) {
    if (e.wall_time_s > t) break;
    best = e.best_value;
  }
  return best;
}

void write_trace_csv(std::ostream& os, const OptimizationTrace& trace,
                     const TraceCsvOptions& options) {
  std::size_t dim = options.parameter_names.size();
  for (const auto& e : trace.events) dim = std::max(dim, e.best_point.size());
  std::ostringstream out;
  out.precision(17);
  out << "calls";
  if (options.include_timing) out << ",wall_time_s";
  out << ",best_value";
  for (std::size_t j = 0; j < dim; ++j) {
    out << ',';
    if (j < options.parameter_names.size()) {
      out << options.parameter_names[j];
    } else {
      out << 'x' << j;
    }
  }
  out << '\n';
  for (const auto& e : trace.events) {
    out << e.calls;
    if (options.include_timing) out << ',' << e.wall_time_s;
    out << ',' << e.best_value;
    for (std::size_t j = 0; j < dim; ++j) {
      out << ',';
      if (j < e.best_point.size()) out << e.best_point[j];
    }
    out << '\n';
  }
  os << out.str();
}

}  // namespace tetra

#include "tetra/objectives.hpp"

#include <time.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <thread>

#include "tetra/error.hpp"

namespace tetra {
namespace {

std::vector<Bounds> uniform_box(std::size_t dimension, double lower, double upper) {
  return std::vector<Bounds>(dimension, Bounds{lower, upper});
}

void check_box(std::span<const double> x, const std::vector<Bounds>& box, const char* who) {
  if (x.size() != box.size()) {
    throw InvalidArgument(std::string(who) + ": expected " + std::to_string(box.size()) +
                          " parameters, got " + std::to_string(x.size()));
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= box[j].lower && x[j] <= box[j].upper)) {
      throw InvalidArgument(std::string(who) + ": parameter " + std::to_string(j) + " = " +
                            std::to_string(x[j]) + " outside [" + std::to_string(box[j].lower) +
                            ", " + std::to_string(box[j].upper) + "]");
    }
  }
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

}  // namespace

double BlackBoxObjective::operator()(std::span<const double> x) const {
  if (x.size() != dimension()) {
    throw InvalidArgument(name + ": expected " + std::to_string(dimension()) +
                          " parameters, got " + std::to_string(x.size()));
  }
  return evaluator(x);
}

void SectionField::validate() const {
  if (fractions.empty()) throw InvalidArgument("section field is empty");
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw InvalidArgument("phase fraction " + std::to_string(f) + " outside [0, 1]");
    }
  }
  if (!weights.empty()) {
    if (weights.size() != fractions.size()) {
      throw InvalidArgument("section field weights and fractions differ in length");
    }
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("section weights must be positive");
    }
  }
}

double cov(const SectionField& field) {
  field.validate();
  const std::size_t n = field.fractions.size();
  const bool weighted = !field.weights.empty();
  double total = 0.0;
  double mean = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double w = weighted ? field.weights[p] : 1.0;
    total += w;
    mean += w * field.fractions[p];
  }
  mean /= total;
  if (mean == 0.0) throw NumericalError("coefficient of variation undefined for zero mean");
  double var = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double w = weighted ? field.weights[p] : 1.0;
    const double dev = field.fractions[p] - mean;
    var += w * dev * dev;
  }
  var /= total;
  return std::sqrt(var) / mean;
}

SectionField read_section_field_csv(std::istream& is) {
  SectionField field;
  std::string line;
  std::size_t line_no = 0;
  bool weighted = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    std::vector<double> nums;
    bool numeric = true;
    for (const auto& c : cells) {
      std::size_t used = 0;
      try {
        nums.push_back(std::stod(c, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
      if (c.find_first_not_of(" \t", used) != std::string::npos) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (field.fractions.empty() && line_no == 1) continue;  // header
      throw InvalidArgument("section csv line " + std::to_string(line_no) + ": not numeric");
    }
    if (nums.empty() || nums.size() > 2) {
      throw InvalidArgument("section csv line " + std::to_string(line_no) +
                            ": expected fraction[,weight]");
    }
    if (field.fractions.empty()) weighted = nums.size() == 2;
    if ((nums.size() == 2) != weighted) {
      throw InvalidArgument("section csv line " + std::to_string(line_no) +
                            ": weight column present on some rows only");
    }
    field.fractions.push_back(nums[0]);
    if (weighted) field.weights.push_back(nums[1]);
  }
  field.validate();
  return field;
}

std::vector<Bounds> mixer_bounds() {
  return {{0.0, 30.0}, {0.2, 0.5}, {0.5, 1.5}, {0.2, 0.6}};
}

std::vector<std::string> mixer_parameter_names() {
  return {"y_angle_deg", "connection_radius_mm", "connection_length_mm", "inlet_radius_mm"};
}

double mixer_surrogate(std::span<const double> p) {
  static const std::vector<Bounds> box = mixer_bounds();
  check_box(p, box, "mixer_surrogate");
  const double a = p[0] / 30.0;
  const double c = (p[1] - 0.2) / 0.3;
  const double l = (p[2] - 0.5) / 1.0;
  const double s = (p[3] - 0.2) / 0.4;
  const double q = (c - 0.25) * (c - 0.25) + (s - 0.25) * (s - 0.25);
  const auto gauss = [](double r2, double sigma) { return std::exp(-r2 / (2.0 * sigma * sigma)); };
  const double deep =
      0.273 * gauss((a - 0.75) * (a - 0.75) + (l - 0.25) * (l - 0.25), 0.12) * gauss(q, 0.30);
  const double shallow =
      0.241 * gauss((a - 0.25) * (a - 0.25) + (l - 0.75) * (l - 0.75), 0.15) * gauss(q, 0.35);
  const double ridges = 0.01 * (1.0 - std::cos(4.0 * std::numbers::pi * (a + l)));
  return 0.30 - deep - shallow + 0.35 * q + ridges;
}

BlackBoxObjective mixer_objective() {
  return {"mixer", mixer_bounds(), [](std::span<const double> x) { return mixer_surrogate(x); }};
}

BlackBoxObjective quadratic_objective(std::vector<double> center, std::vector<Bounds> bounds) {
  if (center.size() != bounds.size()) throw InvalidArgument("quadratic: center/bounds mismatch");
  return {"quadratic", std::move(bounds), [c = std::move(center)](std::span<const double> x) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - c[j]) * (x[j] - c[j]);
            return s;
          }};
}

BlackBoxObjective constant_objective(double value, std::vector<Bounds> bounds) {
  return {"constant", std::move(bounds), [value](std::span<const double>) { return value; }};
}

BlackBoxObjective benchmark(const std::string& name, std::size_t dimension) {
  if (dimension < 1) throw InvalidArgument("benchmark dimension must be >= 1");
  if (name == "quadratic") {
    return quadratic_objective(std::vector<double>(dimension, 0.3), uniform_box(dimension, 0.0, 1.0));
  }
  if (name == "rosenbrock") {
    return {name, uniform_box(dimension, -2.0, 2.0), [](std::span<const double> x) {
              if (x.size() == 1) return (1.0 - x[0]) * (1.0 - x[0]);
              double s = 0.0;
              for (std::size_t j = 0; j + 1 < x.size(); ++j) {
                const double t = x[j + 1] - x[j] * x[j];
                s += 100.0 * t * t + (1.0 - x[j]) * (1.0 - x[j]);
              }
              return s;
            }};
  }
  if (name == "rastrigin") {
    return {name, uniform_box(dimension, -5.12, 5.12), [](std::span<const double> x) {
              double s = 10.0 * static_cast<double>(x.size());
              for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
              return s;
            }};
  }
  if (name == "ackley") {
    return {name, uniform_box(dimension, -32.768, 32.768), [](std::span<const double> x) {
              const double n = static_cast<double>(x.size());
              double sq = 0.0;
              double cs = 0.0;
              for (double v : x) {
                sq += v * v;
                cs += std::cos(2.0 * std::numbers::pi * v);
              }
              const double value = -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) +
                                   20.0 + std::numbers::e;
              // exp(1) - exp(1) leaves rounding noise at the origin.
              return std::abs(value) < 1e-14 ? 0.0 : value;
            }};
  }
  throw InvalidArgument("unknown benchmark '" + name + "'");
}

BenchmarkMinimum benchmark_minimum(const std::string& name, std::size_t dimension) {
  if (name == "quadratic") return {std::vector<double>(dimension, 0.3), 0.0};
  if (name == "rosenbrock") return {std::vector<double>(dimension, 1.0), 0.0};
  if (name == "rastrigin" || name == "ackley") return {std::vector<double>(dimension, 0.0), 0.0};
  throw InvalidArgument("unknown benchmark '" + name + "'");
}

void burn_cpu(double seconds) {
  const double start = thread_cpu_seconds();
  volatile double sink = 0.0;
  while (thread_cpu_seconds() - start < seconds) {
    for (int k = 0; k < 1000; ++k) sink = sink + 1e-9;
  }
}

BlackBoxObjective with_latency(BlackBoxObjective obj, double delay_s, LatencyKind kind) {
  if (!(delay_s >= 0.0)) throw InvalidArgument("latency must be >= 0");
  auto inner = std::move(obj.evaluator);
  obj.evaluator = [inner = std::move(inner), delay_s, kind](std::span<const double> x) {
    if (delay_s > 0.0) {
      if (kind == LatencyKind::sleep) {
        std::this_thread::sleep_for(std::chrono::duration<double>(delay_s));
      } else {
        burn_cpu(delay_s);
      }
    }
    return inner(x);
  };
  return obj;
}

BlackBoxObjective with_failures(BlackBoxObjective obj,
                                std::function<bool(std::span<const double>)> fails) {
  auto inner = std::move(obj.evaluator);
  obj.evaluator = [inner = std::move(inner), fails = std::move(fails)](std::span<const double> x) {
    if (fails(x)) throw EvaluationError("simulated evaluation failure");
    return inner(x);
  };
  return obj;
}

BlackBoxObjective with_random_failures(BlackBoxObjective obj, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidArgument("failure rate must be in [0, 1]");
  return with_failures(std::move(obj), [rate, seed](std::span<const double> x) {
    std::uint64_t h = splitmix64(seed);
    for (double v : x) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
    return static_cast<double>(h >> 11) * 0x1.0p-53 < rate;
  });
}

}  // namespace tetra

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tetra/gaussian_process.hpp"
#include "tetra/objectives.hpp"
#include "tetra/tensor_train.hpp"

namespace tetra {

struct ObjectiveSpec {
  /// mixer | quadratic | rosenbrock | rastrigin | ackley | constant
  std::string name;
  /// Required for every objective except mixer, whose box is fixed.
  std::vector<Bounds> bounds;
  /// quadratic only; defaults to 0.3 in every coordinate.
  std::vector<double> center;
  /// constant only.
  double value = 0.0;
  double latency_s = 0.0;
  LatencyKind latency_kind = LatencyKind::sleep;
  double failure_rate = 0.0;
};

enum class OptimizerKind { tetraopt, bayes };

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::tetraopt;
  // tetraopt
  std::vector<std::size_t> points_per_dim{5};
  std::size_t rank = 4;
  std::size_t iterations = 2;
  // bayes
  std::size_t n_initial = 5;
  std::size_t n_iterations = 30;
  double kappa = 2.576;
  KernelKind kernel = KernelKind::matern52;
  double length_scale = 0.25;
  double noise_variance = 1e-6;
};

std::string optimizer_name(OptimizerKind kind);

struct BenchSpec {
  std::size_t batch_size = 32;
  /// Empty means 1, 2, 4, ... up to 4x the core count.
  std::vector<std::size_t> levels;
  double latency_s = 0.05;
  LatencyKind latency_kind = LatencyKind::sleep;
};

struct CrossTestSpec {
  std::vector<std::size_t> shape{8, 8, 8, 8, 8};
  /// Rank of the generating train.
  std::size_t rank = 3;
  /// Rank used by the cross; defaults to `rank`.
  std::optional<std::size_t> cross_rank;
  std::size_t sweeps = 3;
  std::size_t probes = 1000;
};

struct RunConfig {
  std::optional<ObjectiveSpec> objective;
  std::vector<OptimizerSpec> optimizers;
  std::vector<std::uint64_t> seeds{0};
  std::optional<std::size_t> parallel;
  std::string output = "out";
  BenchSpec bench;
  CrossTestSpec cross;
};

/// Parses and validates a JSON run configuration. Unknown keys, wrong types
/// and out-of-range values throw ConfigError naming the key path; syntax
/// errors report the line number.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Builds the objective described by `spec`, including latency and failure
/// wrappers. Failures are seeded by `seed`.
BlackBoxObjective make_objective(const ObjectiveSpec& spec, std::uint64_t seed = 0);

/// Precedence: command-line flag, then TETRA_PARALLEL, then the config,
/// then the logical core count. `env_value` is the raw variable or null.
std::size_t resolve_parallelism(std::optional<std::size_t> flag, const char* env_value,
                                std::optional<std::size_t> config);

/// Comma-separated non-negative integers, e.g. "0,1,2".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace tetra

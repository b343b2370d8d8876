#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "tetra/objectives.hpp"
#include "tetra/tensor_train.hpp"

namespace tetra {

/// Value substituted for failed or non-finite evaluations (minimization).
inline constexpr double kFailurePenalty = 1e30;

struct Evaluation {
  double value = 0.0;
  bool failed = false;
};

/// Calls the objective once; exceptions and non-finite results become a
/// flagged penalty instead of propagating.
Evaluation evaluate_point(const BlackBoxObjective& objective, std::span<const double> x);

/// Memo of evaluations keyed by grid index. Safe under concurrent access.
class EvalCache {
 public:
  std::optional<Evaluation> find(const MultiIndex& idx) const;
  void insert(const MultiIndex& idx, Evaluation e);
  std::size_t size() const;
  /// Copy of the contents, ordered lexicographically by index.
  std::map<MultiIndex, Evaluation> snapshot() const;

 private:
  mutable std::mutex mutex_;
  std::map<MultiIndex, Evaluation> entries_;
};

struct BatchRequest {
  std::size_t batch_id = 0;
  std::vector<MultiIndex> indices;
  std::vector<std::vector<double>> points;  ///< aligned with `indices`
};

struct BatchResult {
  std::vector<double> values;         ///< aligned with the request
  double wall_time_s = 0.0;
  std::size_t served_from_cache = 0;  ///< positions answered without a call
  std::size_t evaluated = 0;          ///< objective invocations in this batch
  std::vector<std::size_t> failures;  ///< positions holding the penalty
};

/// Logical core count, at least 1.
std::size_t default_parallelism();

/**
 * Evaluates every requested point, at most `max_parallel` at a time, and
 * blocks until the whole batch is done. Each distinct index not already in
 * `cache` is evaluated exactly once; duplicates and earlier results are
 * served from the cache. Results land in request order regardless of
 * completion order.
 */
BatchResult evaluate_batch(const BlackBoxObjective& objective, const BatchRequest& request,
                           std::size_t max_parallel, EvalCache& cache);

/// Same, with a cache private to this call.
BatchResult evaluate_batch(const BlackBoxObjective& objective, const BatchRequest& request,
                           std::size_t max_parallel);

struct ScalingRow {
  std::size_t parallelism = 1;
  double effective_time_per_eval_s = 0.0;
};

/// Times one fresh batch of `batch_size` distinct points per level;
/// effective time = batch wall time / batch size.
std::vector<ScalingRow> parallel_scaling_report(const BlackBoxObjective& objective,
                                                std::size_t batch_size,
                                                std::span<const std::size_t> levels);

/// Header: parallelism,effective_time_per_eval_s
void write_scaling_csv(std::ostream& os, std::span<const ScalingRow> rows);

}  // namespace tetra

#include "tetra/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

#include "tetra/error.hpp"

namespace tetra {

Evaluation evaluate_point(const BlackBoxObjective& objective, std::span<const double> x) {
  try {
    const double v = objective(x);
    if (!std::isfinite(v)) return {kFailurePenalty, true};
    return {v, false};
  } catch (...) {
    return {kFailurePenalty, true};
  }
}

std::optional<Evaluation> EvalCache::find(const MultiIndex& idx) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(idx);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EvalCache::insert(const MultiIndex& idx, Evaluation e) {
  std::lock_guard lock(mutex_);
  entries_.insert_or_assign(idx, e);
}

std::size_t EvalCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::map<MultiIndex, Evaluation> EvalCache::snapshot() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::size_t default_parallelism() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

BatchResult evaluate_batch(const BlackBoxObjective& objective, const BatchRequest& request,
                           std::size_t max_parallel, EvalCache& cache) {
  if (max_parallel < 1) throw InvalidArgument("evaluate_batch: max_parallel must be >= 1");
  if (request.indices.size() != request.points.size()) {
    throw InvalidArgument("evaluate_batch: indices and points are not aligned");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = request.indices.size();

  // First request position of every index the cache does not know yet.
  std::vector<std::size_t> todo;
  {
    std::map<MultiIndex, bool> planned;
    for (std::size_t p = 0; p < n; ++p) {
      const MultiIndex& idx = request.indices[p];
      if (planned.contains(idx) || cache.find(idx)) continue;
      planned.emplace(idx, true);
      todo.push_back(p);
    }
  }

  std::vector<Evaluation> fresh(todo.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < todo.size(); t = next.fetch_add(1)) {
      const std::size_t p = todo[t];
      fresh[t] = evaluate_point(objective, request.points[p]);
    }
  };
  const std::size_t threads = std::min(max_parallel, todo.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  for (std::size_t t = 0; t < todo.size(); ++t) cache.insert(request.indices[todo[t]], fresh[t]);

  BatchResult result;
  result.values.resize(n);
  result.evaluated = todo.size();
  result.served_from_cache = n - todo.size();
  for (std::size_t p = 0; p < n; ++p) {
    const Evaluation e = *cache.find(request.indices[p]);
    result.values[p] = e.value;
    if (e.failed) result.failures.push_back(p);
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

BatchResult evaluate_batch(const BlackBoxObjective& objective, const BatchRequest& request,
                           std::size_t max_parallel) {
  EvalCache cache;
  return evaluate_batch(objective, request, max_parallel, cache);
}

std::vector<ScalingRow> parallel_scaling_report(const BlackBoxObjective& objective,
                                                std::size_t batch_size,
                                                std::span<const std::size_t> levels) {
  if (batch_size < 1) throw InvalidArgument("scaling report: batch size must be >= 1");
  std::vector<double> center;
  for (const Bounds& b : objective.bounds) center.push_back(0.5 * (b.lower + b.upper));
  BatchRequest request;
  for (std::size_t k = 0; k < batch_size; ++k) {
    request.indices.push_back(MultiIndex{k});
    request.points.push_back(center);
  }
  std::vector<ScalingRow> rows;
  for (std::size_t level : levels) {
    if (level < 1) throw InvalidArgument("scaling report: parallelism levels must be >= 1");
    const BatchResult r = evaluate_batch(objective, request, level);
    rows.push_back({level, r.wall_time_s / static_cast<double>(batch_size)});
  }
  return rows;
}

void write_scaling_csv(std::ostream& os, std::span<const ScalingRow> rows) {
  os << "parallelism,effective_time_per_eval_s\n";
  const auto old = os.precision(9);
  for (const auto& row : rows) os << row.parallelism << ',' << row.effective_time_per_eval_s << '\n';
  os.precision(old);
}

}  // namespace tetra

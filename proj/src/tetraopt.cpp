#include "tetra/tetraopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "tetra/error.hpp"
#include "tetra/seeding.hpp"

namespace tetra {
namespace {

struct Incumbent {
  double value = std::numeric_limits<double>::infinity();
  MultiIndex index;

  // Strictly better, or equal with a lexicographically smaller index.
  bool improved_by(double v, const MultiIndex& idx) const {
    if (v < value) return true;
    return v == value && !index.empty() && idx < index;
  }
};

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

}  // namespace

TetraOptResult tetraopt_minimize(const BlackBoxObjective& objective, const TetraOptConfig& config) {
  const SearchGrid& grid = config.grid;
  if (grid.dimension() == 0) throw InvalidArgument("tetraopt: empty search grid");
  if (grid.dimension() != objective.dimension()) {
    throw InvalidArgument("tetraopt: objective dimension " + std::to_string(objective.dimension()) +
                          " differs from grid dimension " + std::to_string(grid.dimension()));
  }
  if (config.rank < 1) throw InvalidArgument("tetraopt: rank must be >= 1");
  if (config.iterations < 1) throw InvalidArgument("tetraopt: iterations must be >= 1");
  if (config.max_parallel < 1) throw InvalidArgument("tetraopt: max_parallel must be >= 1");

  BlackBoxObjective signed_objective = objective;
  if (!config.minimize) {
    signed_objective.evaluator = [inner = objective.evaluator](std::span<const double> x) {
      return -inner(x);
    };
  }
  const double orientation = config.minimize ? 1.0 : -1.0;
  const std::vector<std::size_t> shape = grid.shape();

  TetraOptResult result;
  result.trace.optimizer = "tetraopt";
  EvalCache cache;
  Incumbent best;
  std::set<MultiIndex> logged;
  std::size_t batch_id = 0;
  const auto start = std::chrono::steady_clock::now();

  const BatchOracle oracle = [&](std::span<const MultiIndex> indices) {
    BatchRequest request;
    request.batch_id = batch_id++;
    request.indices.assign(indices.begin(), indices.end());
    for (const auto& idx : indices) request.points.push_back(grid.point(idx));
    const BatchResult br = evaluate_batch(signed_objective, request, config.max_parallel, cache);

    std::vector<bool> failed(indices.size(), false);
    for (std::size_t p : br.failures) failed[p] = true;
    for (std::size_t p = 0; p < indices.size(); ++p) {
      if (logged.insert(indices[p]).second) {
        result.samples.entries.push_back(
            {indices[p], failed[p] ? kFailurePenalty : orientation * br.values[p], request.batch_id});
        if (failed[p]) ++result.failures;
      }
      if (!failed[p] && best.improved_by(br.values[p], indices[p])) {
        best.value = br.values[p];
        best.index = indices[p];
      }
    }

    TraceEvent event;
    event.calls = cache.size();
    event.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!best.index.empty()) {
      event.best_value = orientation * best.value;
      event.best_point = grid.point(best.index);
    }
    result.trace.events.push_back(std::move(event));

    std::vector<double> excess;
    for (std::size_t p = 0; p < indices.size(); ++p) {
      if (!failed[p] && br.values[p] > best.value) excess.push_back(br.values[p] - best.value);
    }
    const double scale = excess.empty() ? 1.0 : median(std::move(excess));
    std::vector<double> out(indices.size());
    for (std::size_t p = 0; p < indices.size(); ++p) {
      const double y = failed[p] ? kFailurePenalty : br.values[p];
      const double z = best.index.empty() ? 0.0 : (y - best.value) / scale;
      out[p] = std::numbers::pi / 2.0 - std::atan(z);
    }
    return out;
  };

  for (std::size_t pass = 0; pass < config.iterations; ++pass) {
    CrossOptions opts;
    opts.rank = config.rank;
    opts.sweeps = 1;
    opts.seed = derive_seed(config.seed, pass);
    opts.maxvol = config.maxvol;
    CrossResult cr = tt_cross(oracle, shape, opts);
    result.surrogate = std::move(cr.tt);
  }

  result.best_index = best.index;
  result.trace.total_calls = cache.size();
  result.trace.total_runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace tetra

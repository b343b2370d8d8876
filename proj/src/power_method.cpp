#include "tetra/power_method.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tetra/error.hpp"
#include "tetra/tt_cross.hpp"

namespace tetra {
namespace {

constexpr double kTieTol = 1e-12;

TensorTrain normalized(const TensorTrain& tt, std::size_t step) {
  const double norm = tt_norm(tt);
  if (!std::isfinite(norm)) {
    throw NumericalError("power method: non-finite iterate at step " + std::to_string(step));
  }
  if (norm == 0.0) {
    throw NumericalError("power method: iterate vanished at step " + std::to_string(step));
  }
  return tt_scale(tt, 1.0 / norm);
}

}  // namespace

double estimate_power_shift(const TensorTrain& tt, std::size_t probe_count, std::uint64_t seed) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const auto& modes = tt.mode_sizes();
  const std::size_t size = tt.dense_size();
  if (size <= probe_count) {
    const DenseTensor full = tt_full(tt, size);
    for (double v : full.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  } else {
    std::mt19937_64 rng(seed);
    MultiIndex idx(modes.size());
    for (std::size_t p = 0; p < probe_count; ++p) {
      for (std::size_t k = 0; k < modes.size(); ++k) {
        idx[k] = std::uniform_int_distribution<std::size_t>(0, modes[k] - 1)(rng);
      }
      const double v = tt_eval(tt, idx);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo >= 0.0) return 0.0;
  return -lo + 0.05 * (hi - lo);
}

std::vector<TensorTrain> power_iterates(const TensorTrain& tt, const PowerConfig& config,
                                        double shift) {
  if (config.max_rank < 1) throw InvalidArgument("power method: max_rank must be >= 1");
  if (!(config.rel_tol >= 0.0)) throw InvalidArgument("power method: rel_tol must be >= 0");
  TensorTrain y = tt;
  if (shift != 0.0) {
    y = tt_round(tt_add(tt, TensorTrain::constant(tt.mode_sizes(), shift)),
                 std::numeric_limits<std::size_t>::max(), config.rel_tol);
  }
  std::vector<TensorTrain> out;
  out.push_back(normalized(y, 0));
  for (std::size_t s = 1; s <= config.steps; ++s) {
    const TensorTrain& prev = out.back();
    TensorTrain sq = tt_round(tt_hadamard(prev, prev), config.max_rank, config.rel_tol);
    out.push_back(normalized(sq, s));
  }
  return out;
}

PowerResult tt_power_argmax(const TensorTrain& tt, const PowerConfig& config) {
  if (config.steps < 1) throw InvalidArgument("power method: steps must be >= 1");
  PowerResult result;
  result.shift = config.shift ? *config.shift
                              : estimate_power_shift(tt, config.probe_count, config.seed);

  // An identically zero input has no direction to amplify; every index is a maximizer.
  if (tt_norm(tt) == 0.0 && result.shift == 0.0) {
    result.index.assign(tt.order(), 0);
    result.value = tt_eval(tt, result.index);
    return result;
  }

  const std::vector<TensorTrain> iterates = power_iterates(tt, config, result.shift);
  for (std::size_t s = 1; s < iterates.size(); ++s) result.ranks.push_back(iterates[s].max_rank());
  const TensorTrain& last = iterates.back();

  // Candidates: (iterate value, index). Near-ties are settled on the original train.
  std::vector<std::pair<double, MultiIndex>> candidates;
  if (last.dense_size() <= config.dense_cap) {
    const DenseTensor full = tt_full(last, config.dense_cap);
    for (std::size_t f = 0; f < full.values.size(); ++f) {
      candidates.emplace_back(full.values[f], unflatten_index(full.modes, f));
    }
  } else {
    const BatchOracle oracle = [&](std::span<const MultiIndex> indices) {
      std::vector<double> v;
      v.reserve(indices.size());
      for (const auto& idx : indices) v.push_back(tt_eval(last, idx));
      return v;
    };
    CrossOptions opts;
    opts.rank = config.extraction_rank;
    opts.sweeps = 1;
    opts.seed = config.seed;
    const CrossResult cr = tt_cross(oracle, last.mode_sizes(), opts);
    for (const auto& rec : cr.log.entries) candidates.emplace_back(rec.value, rec.index);
  }

  double top = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) top = std::max(top, c.first);
  const double cut = top - kTieTol * std::abs(top);
  bool found = false;
  for (const auto& [value, idx] : candidates) {
    if (value < cut) continue;
    const double original = tt_eval(tt, idx);
    if (!found || original > result.value || (original == result.value && idx < result.index)) {
      result.value = original;
      result.index = idx;
      found = true;
    }
  }
  return result;
}

std::vector<std::size_t> rank_growth_probe(const TensorTrain& tt, std::size_t steps,
                                           std::size_t cap) {
  if (tt.dense_size() > cap) {
    throw SizeError("rank_growth_probe: tensor exceeds dense cap " + std::to_string(cap));
  }
  std::vector<std::size_t> ranks{tt.max_rank()};
  TensorTrain y = tt;
  for (std::size_t s = 0; s < steps; ++s) {
    const TensorTrain sq = tt_hadamard(y, y);
    ranks.push_back(sq.max_rank());
    if (s + 1 < steps) y = tt_round(sq, std::numeric_limits<std::size_t>::max(), 0.0);
  }
  return ranks;
}

}  // namespace tetra

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tetra/tensor_train.hpp"

namespace tetra {

struct PowerConfig {
  /// Number of squarings; the final iterate is proportional to (x + shift)^(2^steps).
  std::size_t steps = 8;
  std::size_t max_rank = 16;
  double rel_tol = 1e-10;
  /// Added before squaring so that maximum and maximum modulus coincide.
  /// When unset it is estimated from `probe_count` seeded probes.
  std::optional<double> shift;
  std::size_t probe_count = 10'000;
  std::uint64_t seed = 0;
  /// Iterates up to this many entries are searched densely; larger ones go
  /// through one cross pass of rank `extraction_rank`.
  std::size_t dense_cap = kDefaultDenseCap;
  std::size_t extraction_rank = 4;
};

struct PowerResult {
  MultiIndex index;
  /// Entry of the original train at `index`.
  double value = 0.0;
  double shift = 0.0;
  /// Max bond rank after each rounded squaring.
  std::vector<std::size_t> ranks;
};

/// Shift making the train nonnegative on sampled entries: 0 when every probe
/// is >= 0, else -min + 5% of the probed range. Enumerates all entries when
/// there are no more than `probe_count` of them.
double estimate_power_shift(const TensorTrain& tt, std::size_t probe_count, std::uint64_t seed);

/// y_0 = (tt + shift) / |tt + shift|, y_{k+1} = round(y_k * y_k) / |.|.
/// Returns y_0..y_steps. Throws NumericalError on a non-finite or vanishing iterate.
std::vector<TensorTrain> power_iterates(const TensorTrain& tt, const PowerConfig& config,
                                        double shift);

/**
 * Largest entry of `tt` via repeated elementwise squaring with rank
 * truncation. The argmax of the last iterate is read densely when small
 * enough, otherwise from the samples of one TT-cross pass over it; the
 * reported value is always re-evaluated on the original train.
 */
PowerResult tt_power_argmax(const TensorTrain& tt, const PowerConfig& config = {});

/// Max bond rank before each truncation: the input rank, then the rank of
/// each elementwise square. Between steps the square is compressed without
/// tolerance, so ranks only saturate at the limits set by the mode sizes.
/// Throws SizeError if the train exceeds the dense cap.
std::vector<std::size_t> rank_growth_probe(const TensorTrain& tt, std::size_t steps,
                                           std::size_t cap = kDefaultDenseCap);

}  // namespace tetra

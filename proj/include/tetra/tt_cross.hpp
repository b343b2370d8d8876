#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tetra/maxvol.hpp"
#include "tetra/tensor_train.hpp"

namespace tetra {

/// Batch interface to the tensor being approximated: one value per requested
/// index, aligned with the request. The caller may evaluate the batch in any
/// order or concurrently; the cross consumes it as a whole.
using BatchOracle = std::function<std::vector<double>(std::span<const MultiIndex>)>;

struct SampleRecord {
  MultiIndex index;
  double value = 0.0;
  std::size_t batch_id = 0;
};

/// Every index the cross sent to the oracle, in request order. Repeated
/// requests are answered from the log and never reach the oracle again, so
/// each index appears once.
struct SampleLog {
  std::vector<SampleRecord> entries;

  std::size_t unique_count() const noexcept { return entries.size(); }
  std::size_t batch_count() const noexcept {
    return entries.empty() ? 0 : entries.back().batch_id + 1;
  }
};

/// Interpolation sets: left[k] holds prefixes (i_0..i_{k-1}), right[k] holds
/// suffixes (i_k..i_{d-1}); both have size r_k.
struct NestedIndexSets {
  std::vector<std::vector<MultiIndex>> left;
  std::vector<std::vector<MultiIndex>> right;
};

struct CrossOptions {
  std::size_t rank = 4;
  /// One sweep = left-to-right then right-to-left.
  std::size_t sweeps = 1;
  std::uint64_t seed = 0;
  MaxVolOptions maxvol{};
};

struct CrossResult {
  TensorTrain tt;
  SampleLog log;
  NestedIndexSets index_sets;
  std::size_t max_batch_size = 0;
  /// Number of maxvol calls that needed the rank-deficiency fallback.
  std::size_t regularized_maxvols = 0;
};

/// Bond ranks used by the cross: min(rank, prod of modes left of the bond,
/// prod of modes right of the bond), with r_0 = r_d = 1.
std::vector<std::size_t> cross_ranks(std::span<const std::size_t> shape, std::size_t rank);

/**
 * TT-cross approximation driven by maxvol row selection.
 *
 * Right index sets start as seeded uniform draws. Each core update requests
 * the fiber block (left set) x (mode) x (right set), at most n_k * r^2
 * entries, orthogonalizes it, and picks the next nested set with maxvol.
 * Deterministic for a given (oracle, shape, options).
 */
CrossResult tt_cross(const BatchOracle& oracle, std::span<const std::size_t> shape,
                     const CrossOptions& options);

}  // namespace tetra

#include "tetra/tt_cross.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "tetra/error.hpp"

namespace tetra {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

MultiIndex join(const MultiIndex& prefix, std::size_t i, const MultiIndex& suffix) {
  MultiIndex idx;
  idx.reserve(prefix.size() + 1 + suffix.size());
  idx.insert(idx.end(), prefix.begin(), prefix.end());
  idx.push_back(i);
  idx.insert(idx.end(), suffix.begin(), suffix.end());
  return idx;
}

// Thin Q of a tall matrix followed by the interpolation basis Q * Q(rows)^{-1}.
struct Skeleton {
  std::vector<std::size_t> rows;
  RowMatrix basis;
  bool regularized = false;
};

Skeleton skeleton(const RowMatrix& m, std::size_t rank, const MaxVolOptions& opts) {
  const auto r = static_cast<Eigen::Index>(rank);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), r);
  MaxVolResult mv = maxvol(q, opts);
  Eigen::MatrixXd sub(r, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    sub.row(k) = q.row(static_cast<Eigen::Index>(mv.row_indices[static_cast<std::size_t>(k)]));
  }
  Skeleton s;
  s.basis = q * sub.partialPivLu().inverse();
  s.rows = std::move(mv.row_indices);
  s.regularized = mv.regularized;
  return s;
}

class CrossState {
 public:
  CrossState(const BatchOracle& oracle, std::span<const std::size_t> shape)
      : oracle_(oracle), shape_(shape.begin(), shape.end()) {}

  // Values for `indices`; unseen ones go to the oracle as one batch.
  std::vector<double> fetch(const std::vector<MultiIndex>& indices) {
    std::vector<MultiIndex> fresh;
    for (const auto& idx : indices) {
      if (!memo_.contains(idx)) fresh.push_back(idx);
    }
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    if (!fresh.empty()) {
      const std::vector<double> values = oracle_(std::span<const MultiIndex>(fresh));
      if (values.size() != fresh.size()) {
        throw InvalidArgument("tt_cross: oracle returned " + std::to_string(values.size()) +
                              " values for " + std::to_string(fresh.size()) + " indices");
      }
      for (std::size_t p = 0; p < fresh.size(); ++p) {
        if (!std::isfinite(values[p])) {
          std::string where;
          for (std::size_t k = 0; k < fresh[p].size(); ++k) {
            where += (k ? "," : "") + std::to_string(fresh[p][k]);
          }
          throw EvaluationError("tt_cross: non-finite oracle value at index (" + where + ")");
        }
        memo_.emplace(fresh[p], values[p]);
        log_.entries.push_back({fresh[p], values[p], batches_});
      }
      ++batches_;
    }
    max_batch_ = std::max(max_batch_, indices.size());
    std::vector<double> out;
    out.reserve(indices.size());
    for (const auto& idx : indices) out.push_back(memo_.at(idx));
    return out;
  }

  SampleLog take_log() { return std::move(log_); }
  std::size_t max_batch() const { return max_batch_; }

 private:
  const BatchOracle& oracle_;
  std::vector<std::size_t> shape_;
  std::map<MultiIndex, double> memo_;
  SampleLog log_;
  std::size_t batches_ = 0;
  std::size_t max_batch_ = 0;
};

}  // namespace

std::vector<std::size_t> cross_ranks(std::span<const std::size_t> shape, std::size_t rank) {
  const std::size_t d = shape.size();
  std::vector<std::size_t> r(d + 1, 1);
  for (std::size_t k = 1; k < d; ++k) {
    std::size_t left = 1;
    for (std::size_t j = 0; j < k && left < rank; ++j) left *= shape[j];
    std::size_t right = 1;
    for (std::size_t j = k; j < d && right < rank; ++j) right *= shape[j];
    r[k] = std::min({rank, left, right});
  }
  return r;
}

CrossResult tt_cross(const BatchOracle& oracle, std::span<const std::size_t> shape,
                     const CrossOptions& options) {
  if (shape.empty()) throw InvalidArgument("tt_cross: empty shape");
  if (options.rank < 1) throw InvalidArgument("tt_cross: rank must be >= 1");
  if (options.sweeps < 1) throw InvalidArgument("tt_cross: sweeps must be >= 1");
  for (std::size_t n : shape) {
    if (n < 1) throw InvalidArgument("tt_cross: mode sizes must be >= 1");
  }

  const std::size_t d = shape.size();
  const std::vector<std::size_t> r = cross_ranks(shape, options.rank);
  CrossState state(oracle, shape);
  std::size_t regularized = 0;

  NestedIndexSets sets;
  sets.left.assign(d + 1, {});
  sets.right.assign(d + 1, {});
  sets.left[0] = {MultiIndex{}};
  sets.right[d] = {MultiIndex{}};

  std::mt19937_64 rng(options.seed);
  for (std::size_t k = d; k-- > 1;) {
    std::set<MultiIndex> seen;
    while (sets.right[k].size() < r[k]) {
      MultiIndex suffix(d - k);
      for (std::size_t j = k; j < d; ++j) {
        suffix[j - k] = std::uniform_int_distribution<std::size_t>(0, shape[j] - 1)(rng);
      }
      if (seen.insert(suffix).second) sets.right[k].push_back(std::move(suffix));
    }
  }

  std::vector<TtCore> cores(d);

  const auto fiber = [&](std::size_t k) {
    std::vector<MultiIndex> req;
    req.reserve(r[k] * shape[k] * r[k + 1]);
    for (const auto& prefix : sets.left[k]) {
      for (std::size_t i = 0; i < shape[k]; ++i) {
        for (const auto& suffix : sets.right[k + 1]) req.push_back(join(prefix, i, suffix));
      }
    }
    return state.fetch(req);  // ordered (alpha, i, beta)
  };

  const auto raw_core = [&](std::size_t k) {
    TtCore c(r[k], shape[k], r[k + 1]);
    c.data = fiber(k);
    return c;
  };

  if (d == 1) {
    cores[0] = raw_core(0);
  } else {
    for (std::size_t sweep = 0; sweep < options.sweeps; ++sweep) {
      // Left to right.
      for (std::size_t k = 0; k + 1 < d; ++k) {
        const std::vector<double> v = fiber(k);
        const RowMatrix m = Eigen::Map<const RowMatrix>(
            v.data(), static_cast<Eigen::Index>(r[k] * shape[k]),
            static_cast<Eigen::Index>(r[k + 1]));
        Skeleton s = skeleton(m, r[k + 1], options.maxvol);
        regularized += s.regularized;
        TtCore c(r[k], shape[k], r[k + 1]);
        std::copy(s.basis.data(), s.basis.data() + s.basis.size(), c.data.begin());
        cores[k] = std::move(c);
        std::vector<MultiIndex> next;
        for (std::size_t row : s.rows) {
          MultiIndex prefix = sets.left[k][row / shape[k]];
          prefix.push_back(row % shape[k]);
          next.push_back(std::move(prefix));
        }
        sets.left[k + 1] = std::move(next);
      }
      cores[d - 1] = raw_core(d - 1);

      // Right to left.
      for (std::size_t k = d - 1; k > 0; --k) {
        const std::vector<double> v = fiber(k);
        const RowMatrix m = Eigen::Map<const RowMatrix>(
            v.data(), static_cast<Eigen::Index>(r[k]),
            static_cast<Eigen::Index>(shape[k] * r[k + 1]));
        Skeleton s = skeleton(m.transpose(), r[k], options.maxvol);
        regularized += s.regularized;
        const RowMatrix w = s.basis.transpose();  // r_k x (n_k * r_{k+1})
        TtCore c(r[k], shape[k], r[k + 1]);
        std::copy(w.data(), w.data() + w.size(), c.data.begin());
        cores[k] = std::move(c);
        std::vector<MultiIndex> next;
        for (std::size_t col : s.rows) {
          MultiIndex suffix{col / r[k + 1]};
          const MultiIndex& tail = sets.right[k + 1][col % r[k + 1]];
          suffix.insert(suffix.end(), tail.begin(), tail.end());
          next.push_back(std::move(suffix));
        }
        sets.right[k] = std::move(next);
      }
      cores[0] = raw_core(0);
    }
  }

  CrossResult result{TensorTrain(std::move(cores)), state.take_log(), std::move(sets),
                     state.max_batch(), regularized};
  return result;
}

}  // namespace tetra

#include "tetra/tensor_train.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "tetra/error.hpp"

namespace tetra {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

// Left unfolding: (left * mode) x right.
ConstRowMap left_unfolding(const TtCore& c) {
  return ConstRowMap(c.data.data(), static_cast<Eigen::Index>(c.left * c.mode),
                     static_cast<Eigen::Index>(c.right));
}

// Right unfolding: left x (mode * right).
ConstRowMap right_unfolding(const TtCore& c) {
  return ConstRowMap(c.data.data(), static_cast<Eigen::Index>(c.left),
                     static_cast<Eigen::Index>(c.mode * c.right));
}

TtCore core_from_matrix(const RowMatrix& m, std::size_t left, std::size_t mode,
                        std::size_t right) {
  TtCore c(left, mode, right);
  std::copy(m.data(), m.data() + m.size(), c.data.begin());
  return c;
}

void require_same_modes(const TensorTrain& a, const TensorTrain& b, const char* op) {
  if (a.mode_sizes() != b.mode_sizes()) {
    throw ShapeError(std::string(op) + ": mode sizes differ");
  }
}

}  // namespace

TensorTrain::TensorTrain(std::vector<TtCore> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) throw InvalidArgument("tensor train needs at least one core");
  if (cores_.front().left != 1 || cores_.back().right != 1) {
    throw InvalidArgument("boundary ranks must be 1");
  }
  modes_.reserve(cores_.size());
  for (std::size_t k = 0; k < cores_.size(); ++k) {
    const TtCore& c = cores_[k];
    if (c.left == 0 || c.mode == 0 || c.right == 0) {
      throw InvalidArgument("core " + std::to_string(k) + " has a zero extent");
    }
    if (c.data.size() != c.left * c.mode * c.right) {
      throw InvalidArgument("core " + std::to_string(k) + " data size mismatch");
    }
    if (k + 1 < cores_.size() && c.right != cores_[k + 1].left) {
      throw InvalidArgument("rank mismatch between cores " + std::to_string(k) + " and " +
                            std::to_string(k + 1));
    }
    modes_.push_back(c.mode);
  }
}

TensorTrain TensorTrain::rank_one(const std::vector<std::vector<double>>& factors) {
  std::vector<TtCore> cores;
  cores.reserve(factors.size());
  for (const auto& f : factors) {
    TtCore c(1, f.size(), 1);
    c.data = f;
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain TensorTrain::constant(std::span<const std::size_t> modes, double value) {
  std::vector<std::vector<double>> factors;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    factors.emplace_back(modes[k], k == 0 ? value : 1.0);
  }
  return rank_one(factors);
}

std::vector<std::size_t> TensorTrain::ranks() const {
  std::vector<std::size_t> r;
  r.reserve(cores_.size() + 1);
  r.push_back(cores_.front().left);
  for (const auto& c : cores_) r.push_back(c.right);
  return r;
}

std::size_t TensorTrain::max_rank() const {
  const auto r = ranks();
  return *std::max_element(r.begin(), r.end());
}

std::size_t TensorTrain::parameter_count() const {
  std::size_t total = 0;
  for (const auto& c : cores_) total += c.data.size();
  return total;
}

std::size_t TensorTrain::dense_size() const {
  std::size_t total = 1;
  for (std::size_t n : modes_) {
    if (total > std::numeric_limits<std::size_t>::max() / n) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= n;
  }
  return total;
}

void TensorTrain::check_index(std::span<const std::size_t> idx) const {
  if (idx.size() != modes_.size()) {
    throw InvalidArgument("index has " + std::to_string(idx.size()) + " entries, tensor order is " +
                          std::to_string(modes_.size()));
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= modes_[k]) {
      throw InvalidArgument("index entry " + std::to_string(k) + " = " + std::to_string(idx[k]) +
                            " out of range [0, " + std::to_string(modes_[k]) + ")");
    }
  }
}

double DenseTensor::at(std::span<const std::size_t> idx) const {
  return values.at(flat_index(modes, idx));
}

std::size_t flat_index(std::span<const std::size_t> modes, std::span<const std::size_t> idx) {
  if (idx.size() != modes.size()) throw InvalidArgument("index length mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (idx[k] >= modes[k]) throw InvalidArgument("index out of range");
    flat = flat * modes[k] + idx[k];
  }
  return flat;
}

MultiIndex unflatten_index(std::span<const std::size_t> modes, std::size_t flat) {
  MultiIndex idx(modes.size());
  for (std::size_t k = modes.size(); k-- > 0;) {
    idx[k] = flat % modes[k];
    flat /= modes[k];
  }
  return idx;
}

double tt_eval(const TensorTrain& tt, std::span<const std::size_t> idx) {
  tt.check_index(idx);
  std::vector<double> row{1.0};
  std::vector<double> next;
  for (std::size_t k = 0; k < tt.order(); ++k) {
    const TtCore& c = tt.core(k);
    next.assign(c.right, 0.0);
    for (std::size_t a = 0; a < c.left; ++a) {
      const double v = row[a];
      if (v == 0.0) continue;
      const double* slice = &c.data[(a * c.mode + idx[k]) * c.right];
      for (std::size_t b = 0; b < c.right; ++b) next[b] += v * slice[b];
    }
    row.swap(next);
  }
  return row[0];
}

DenseTensor tt_full(const TensorTrain& tt, std::size_t cap) {
  const std::size_t size = tt.dense_size();
  if (size > cap) {
    throw SizeError("dense materialization of " + std::to_string(size) +
                    " entries exceeds cap " + std::to_string(cap));
  }
  // Running (prefix entries) x (current bond) matrix.
  RowMatrix acc = RowMatrix::Ones(1, 1);
  for (const TtCore& c : tt.cores()) {
    const auto rows = acc.rows();
    RowMatrix next(rows * static_cast<Eigen::Index>(c.mode), static_cast<Eigen::Index>(c.right));
    for (std::size_t i = 0; i < c.mode; ++i) {
      RowMatrix slice(static_cast<Eigen::Index>(c.left), static_cast<Eigen::Index>(c.right));
      for (std::size_t a = 0; a < c.left; ++a) {
        for (std::size_t b = 0; b < c.right; ++b) slice(a, b) = c(a, i, b);
      }
      const RowMatrix part = acc * slice;
      for (Eigen::Index p = 0; p < rows; ++p) {
        next.row(p * static_cast<Eigen::Index>(c.mode) + static_cast<Eigen::Index>(i)) = part.row(p);
      }
    }
    acc = std::move(next);
  }
  DenseTensor out;
  out.modes = tt.mode_sizes();
  out.values.assign(acc.data(), acc.data() + acc.size());
  return out;
}

TensorTrain tt_hadamard(const TensorTrain& a, const TensorTrain& b) {
  require_same_modes(a, b, "tt_hadamard");
  std::vector<TtCore> cores;
  cores.reserve(a.order());
  for (std::size_t k = 0; k < a.order(); ++k) {
    const TtCore& x = a.core(k);
    const TtCore& y = b.core(k);
    TtCore c(x.left * y.left, x.mode, x.right * y.right);
    for (std::size_t a1 = 0; a1 < x.left; ++a1) {
      for (std::size_t a2 = 0; a2 < y.left; ++a2) {
        for (std::size_t i = 0; i < x.mode; ++i) {
          for (std::size_t b1 = 0; b1 < x.right; ++b1) {
            const double xv = x(a1, i, b1);
            for (std::size_t b2 = 0; b2 < y.right; ++b2) {
              c(a1 * y.left + a2, i, b1 * y.right + b2) = xv * y(a2, i, b2);
            }
          }
        }
      }
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain tt_add(const TensorTrain& a, const TensorTrain& b) {
  require_same_modes(a, b, "tt_add");
  const std::size_t d = a.order();
  if (d == 1) {
    TtCore c = a.core(0);
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] += b.core(0).data[i];
    return TensorTrain({std::move(c)});
  }
  std::vector<TtCore> cores;
  cores.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    const TtCore& x = a.core(k);
    const TtCore& y = b.core(k);
    const bool first = k == 0;
    const bool last = k + 1 == d;
    const std::size_t left = first ? 1 : x.left + y.left;
    const std::size_t right = last ? 1 : x.right + y.right;
    TtCore c(left, x.mode, right);
    const std::size_t y_left_off = first ? 0 : x.left;
    const std::size_t y_right_off = last ? 0 : x.right;
    for (std::size_t i = 0; i < x.mode; ++i) {
      for (std::size_t p = 0; p < x.left; ++p) {
        for (std::size_t q = 0; q < x.right; ++q) c(p, i, q) += x(p, i, q);
      }
      for (std::size_t p = 0; p < y.left; ++p) {
        for (std::size_t q = 0; q < y.right; ++q) {
          c(p + y_left_off, i, q + y_right_off) += y(p, i, q);
        }
      }
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain tt_scale(const TensorTrain& tt, double factor) {
  std::vector<TtCore> cores = tt.cores();
  for (double& v : cores.front().data) v *= factor;
  return TensorTrain(std::move(cores));
}

double tt_dot(const TensorTrain& a, const TensorTrain& b) {
  require_same_modes(a, b, "tt_dot");
  // M_k = sum_i A_k(i)^T M_{k-1} B_k(i), size ra_k x rb_k.
  RowMatrix m = RowMatrix::Ones(1, 1);
  for (std::size_t k = 0; k < a.order(); ++k) {
    const TtCore& x = a.core(k);
    const TtCore& y = b.core(k);
    RowMatrix next = RowMatrix::Zero(static_cast<Eigen::Index>(x.right),
                                     static_cast<Eigen::Index>(y.right));
    RowMatrix xs(x.left, x.right);
    RowMatrix ys(y.left, y.right);
    for (std::size_t i = 0; i < x.mode; ++i) {
      for (std::size_t p = 0; p < x.left; ++p) {
        for (std::size_t q = 0; q < x.right; ++q) xs(p, q) = x(p, i, q);
      }
      for (std::size_t p = 0; p < y.left; ++p) {
        for (std::size_t q = 0; q < y.right; ++q) ys(p, q) = y(p, i, q);
      }
      next.noalias() += xs.transpose() * m * ys;
    }
    m = std::move(next);
  }
  return m(0, 0);
}

double tt_norm(const TensorTrain& tt) { return std::sqrt(std::max(0.0, tt_dot(tt, tt))); }

TensorTrain tt_round(const TensorTrain& tt, std::size_t max_rank, double rel_tol) {
  if (max_rank < 1) throw InvalidArgument("tt_round: max_rank must be >= 1");
  if (!(rel_tol >= 0.0)) throw InvalidArgument("tt_round: rel_tol must be >= 0");
  std::vector<TtCore> cores = tt.cores();
  const std::size_t d = cores.size();
  if (d == 1) return TensorTrain(std::move(cores));

  // Right-to-left: make cores 1..d-1 right-orthonormal.
  for (std::size_t k = d - 1; k > 0; --k) {
    TtCore& c = cores[k];
    const RowMatrix mt = right_unfolding(c).transpose();  // (mode*right) x left
    Eigen::HouseholderQR<RowMatrix> qr(mt);
    const Eigen::Index rows = mt.rows();
    const Eigen::Index keep = std::min(rows, mt.cols());
    const RowMatrix q = qr.householderQ() * RowMatrix::Identity(rows, keep);
    const RowMatrix r = qr.matrixQR().topRows(keep).triangularView<Eigen::Upper>();
    // c = r^T q^T
    const RowMatrix qt = q.transpose();
    const std::size_t new_left = static_cast<std::size_t>(keep);
    TtCore nc = core_from_matrix(qt, new_left, c.mode, c.right);
    TtCore& prev = cores[k - 1];
    const RowMatrix pm = left_unfolding(prev) * r.transpose();
    cores[k - 1] = core_from_matrix(pm, prev.left, prev.mode, new_left);
    c = std::move(nc);
  }

  const double norm = ConstRowMap(cores[0].data.data(), 1,
                                  static_cast<Eigen::Index>(cores[0].data.size()))
                          .norm();
  const double delta = rel_tol * norm / std::sqrt(static_cast<double>(d - 1));

  // Left-to-right truncated SVD.
  for (std::size_t k = 0; k + 1 < d; ++k) {
    TtCore& c = cores[k];
    const RowMatrix m = left_unfolding(c);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const Eigen::Index full = s.size();
    Eigen::Index rank = full;
    if (delta > 0.0) {
      double tail = 0.0;
      while (rank > 1) {
        const double next_tail = tail + s(rank - 1) * s(rank - 1);
        if (std::sqrt(next_tail) > delta) break;
        tail = next_tail;
        --rank;
      }
    }
    if (static_cast<std::size_t>(rank) > max_rank) rank = static_cast<Eigen::Index>(max_rank);
    rank = std::max<Eigen::Index>(rank, 1);
    const RowMatrix u = svd.matrixU().leftCols(rank);
    const RowMatrix sv = s.head(rank).asDiagonal() * svd.matrixV().leftCols(rank).transpose();
    TtCore& next = cores[k + 1];
    const RowMatrix nm = sv * right_unfolding(next);
    const std::size_t r = static_cast<std::size_t>(rank);
    TtCore new_next = core_from_matrix(nm, r, next.mode, next.right);
    c = core_from_matrix(u, c.left, c.mode, r);
    next = std::move(new_next);
  }
  return TensorTrain(std::move(cores));
}

TensorTrain random_tensor_train(std::span<const std::size_t> modes, std::size_t rank,
                                std::uint64_t seed, CoreDistribution dist) {
  if (modes.empty()) throw InvalidArgument("random_tensor_train: empty shape");
  if (rank < 1) throw InvalidArgument("random_tensor_train: rank must be >= 1");
  const std::size_t d = modes.size();
  const auto saturating_product = [&](std::size_t from, std::size_t to) {
    std::size_t p = 1;
    for (std::size_t j = from; j < to; ++j) {
      p = p > rank ? p : p * modes[j];
    }
    return p;
  };
  std::vector<std::size_t> r(d + 1, 1);
  for (std::size_t k = 1; k < d; ++k) {
    r[k] = std::min({rank, saturating_product(0, k), saturating_product(k, d)});
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<TtCore> cores;
  for (std::size_t k = 0; k < d; ++k) {
    TtCore c(r[k], modes[k], r[k + 1]);
    for (double& v : c.data) v = dist == CoreDistribution::normal ? normal(rng) : uniform(rng);
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

void write_tensor_train(std::ostream& os, const TensorTrain& tt) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "tetra-tt 1\n" << tt.order() << '\n';
  const auto& modes = tt.mode_sizes();
  for (std::size_t k = 0; k < modes.size(); ++k) buf << (k ? " " : "") << modes[k];
  buf << '\n';
  const auto ranks = tt.ranks();
  for (std::size_t k = 0; k < ranks.size(); ++k) buf << (k ? " " : "") << ranks[k];
  buf << '\n';
  for (const TtCore& c : tt.cores()) {
    for (std::size_t p = 0; p < c.data.size(); ++p) {
      buf << (p ? " " : "") << c.data[p];
    }
    buf << '\n';
  }
  os << buf.str();
}

TensorTrain read_tensor_train(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "tetra-tt" || version != 1) {
    throw InvalidArgument("not a tetra-tt v1 container");
  }
  std::size_t d = 0;
  if (!(is >> d) || d == 0) throw InvalidArgument("bad tensor order");
  std::vector<std::size_t> modes(d);
  for (auto& n : modes) {
    if (!(is >> n)) throw InvalidArgument("truncated mode sizes");
  }
  std::vector<std::size_t> ranks(d + 1);
  for (auto& r : ranks) {
    if (!(is >> r)) throw InvalidArgument("truncated ranks");
  }
  std::vector<TtCore> cores;
  for (std::size_t k = 0; k < d; ++k) {
    TtCore c(ranks[k], modes[k], ranks[k + 1]);
    for (double& v : c.data) {
      if (!(is >> v)) throw InvalidArgument("truncated core " + std::to_string(k));
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

}  // namespace tetra

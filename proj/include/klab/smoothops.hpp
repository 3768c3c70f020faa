#pragma once

// Truncated smooth operators: N x N complex matrices with the weighted
// operator norms ||x||_q, projections built from orthonormal systems, and
// the row systems that describe the commutative subalgebras they generate.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klab/koethe.hpp"
#include "klab/parallel.hpp"
#include "klab/seqvector.hpp"
#include "klab/subalgebra.hpp"

namespace klab {

class SmoothMatrix {
 public:
  using Dense = Eigen::MatrixXcd;

  explicit SmoothMatrix(std::size_t dim) : m_(Dense::Zero(checked_dim(dim), checked_dim(dim))) {}

  explicit SmoothMatrix(Dense m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) throw std::invalid_argument("SmoothMatrix: need a square matrix");
    if (!m_.allFinite()) throw std::invalid_argument("SmoothMatrix: non-finite entry");
  }

  static SmoothMatrix identity(std::size_t dim) {
    return SmoothMatrix(Dense::Identity(checked_dim(dim), checked_dim(dim)));
  }

  /// Matrix unit E_{ij}, 1-based.
  static SmoothMatrix unit(std::size_t dim, std::size_t i, std::size_t j) {
    SmoothMatrix out(dim);
    if (i < 1 || j < 1 || i > dim || j > dim) throw std::out_of_range("SmoothMatrix::unit: index out of range");
    out.m_(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) = 1.0;
    return out;
  }

  /// The operator xi -> <xi, f> f, i.e. f f^*.
  static SmoothMatrix rank_one(const SeqVector& f, std::size_t dim) {
    if (f.max_index() > dim) throw std::domain_error("SmoothMatrix::rank_one: vector exceeds dimension");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    auto idx = f.support();
    auto val = f.values();
    for (std::size_t i = 0; i < idx.size(); ++i) v(static_cast<Eigen::Index>(idx[i] - 1)) = val[i];
    return SmoothMatrix(Dense(v * v.adjoint()));
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Dense& dense() const { return m_; }
  Complex operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
  }

  /// Leading n x n block.
  SmoothMatrix truncate(std::size_t n) const {
    if (n < 1 || n > dim()) throw std::domain_error("SmoothMatrix::truncate: bad size");
    const auto e = static_cast<Eigen::Index>(n);
    return SmoothMatrix(Dense(m_.topLeftCorner(e, e)));
  }

  friend bool operator==(const SmoothMatrix& a, const SmoothMatrix& b) {
    return a.dim() == b.dim() && a.m_ == b.m_;
  }

 private:
  static Eigen::Index checked_dim(std::size_t dim) {
    if (dim < 1) throw std::invalid_argument("SmoothMatrix: dimension must be positive");
    return static_cast<Eigen::Index>(dim);
  }

  Dense m_;
};

inline SmoothMatrix mat_mul(const SmoothMatrix& x, const SmoothMatrix& y) {
  if (x.dim() != y.dim()) throw std::domain_error("mat_mul: dimension mismatch");
  return SmoothMatrix(SmoothMatrix::Dense(x.dense() * y.dense()));
}

inline SmoothMatrix mat_add(const SmoothMatrix& x, const SmoothMatrix& y) {
  if (x.dim() != y.dim()) throw std::domain_error("mat_add: dimension mismatch");
  return SmoothMatrix(SmoothMatrix::Dense(x.dense() + y.dense()));
}

/// (x*)_{jk} = conj(x_{kj}).
inline SmoothMatrix involution(const SmoothMatrix& x) {
  return SmoothMatrix(SmoothMatrix::Dense(x.dense().adjoint()));
}

/// Largest dimension handled by a full singular value decomposition.
inline constexpr std::size_t kExactSvdLimit = 64;

struct PowerIterationOptions {
  double rel_tol = 1e-10;
  int max_iter = 20000;
};

/// Largest singular value of D_q x D_q with D_q = diag(1^q, ..., N^q).
inline double op_norm_q(const SmoothMatrix& x, unsigned q, PowerIterationOptions opt = {}) {
  const auto n = static_cast<Eigen::Index>(x.dim());
  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) w(j) = std::pow(static_cast<double>(j + 1), static_cast<double>(q));
  const SmoothMatrix::Dense m = w.asDiagonal() * x.dense() * w.asDiagonal();
  if (x.dim() <= kExactSvdLimit) {
    Eigen::BDCSVD<SmoothMatrix::Dense> svd(m);
    return svd.singularValues()(0);
  }
  // Power iteration on M^* M from the normalized all-ones vector.
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n) / std::sqrt(static_cast<double>(n));
  double sigma = 0;
  for (int it = 0; it < opt.max_iter; ++it) {
    const Eigen::VectorXcd mv = m * v;
    const double next = mv.norm();
    if (next == 0) return 0;
    Eigen::VectorXcd u = m.adjoint() * mv;
    const double un = u.norm();
    if (un == 0) return next;
    v = u / un;
    if (it > 0 && std::fabs(next - sigma) <= opt.rel_tol * next) return next;
    sigma = next;
  }
  return sigma;
}

/// Relative change of ||x||_q when the truncation is halved.
inline double truncation_drift(const SmoothMatrix& x, unsigned q) {
  if (x.dim() < 2) return 0;
  const double full = op_norm_q(x, q);
  const double half = op_norm_q(x.truncate(x.dim() / 2), q);
  return full == 0 ? 0 : std::fabs(full - half) / full;
}

// ---------------------------------------------------------------------------

inline constexpr double kOrthoTolerance = 1e-10;

/// Orthonormal family (f_k), checked at construction.
class OrthoSystem {
 public:
  explicit OrthoSystem(std::vector<SeqVector> vectors, double tol = kOrthoTolerance)
      : vectors_(std::move(vectors)), tol_(tol) {
    if (!(tol_ >= 0)) throw std::invalid_argument("OrthoSystem: tolerance must be non-negative");
    const std::size_t k = vectors_.size();
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        const Complex g = pairing(vectors_[i], vectors_[j]);
        const double dev = std::abs(g - Complex(i == j ? 1.0 : 0.0));
        if (dev > tol_) {
          throw std::invalid_argument("OrthoSystem: Gram entry (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ") deviates by " + std::to_string(dev));
        }
      }
    }
  }

  std::size_t size() const { return vectors_.size(); }
  const SeqVector& operator[](std::size_t k) const { return vectors_.at(k); }
  const std::vector<SeqVector>& vectors() const { return vectors_; }
  double tol() const { return tol_; }
  std::size_t dim() const {
    std::size_t d = 0;
    for (const auto& v : vectors_) d = std::max(d, v.max_index());
    return d;
  }

  /// Largest |<f_i, f_j> - delta_ij|.
  double gram_defect() const {
    double worst = 0;
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      for (std::size_t j = i; j < vectors_.size(); ++j) {
        worst = std::max(worst, std::abs(pairing(vectors_[i], vectors_[j]) - Complex(i == j ? 1.0 : 0.0)));
      }
    }
    return worst;
  }

 private:
  std::vector<SeqVector> vectors_;
  double tol_;
};

/// P_k = sum_{j in N_k} f_j f_j^*. The partition indexes the system.
inline std::vector<SmoothMatrix> projection_from(const OrthoSystem& system, const Partition& part,
                                                 std::size_t dim = 0) {
  if (dim == 0) dim = std::max<std::size_t>(1, system.dim());
  if (dim < system.dim()) throw std::domain_error("projection_from: dimension smaller than the supports");
  std::vector<SmoothMatrix> out;
  out.reserve(part.classes.size());
  for (const auto& cls : part.classes) {
    SmoothMatrix p(dim);
    for (std::size_t j : cls) {
      if (j < 1 || j > system.size()) {
        throw std::domain_error("projection_from: class index " + std::to_string(j) + " out of range");
      }
      p = mat_add(p, SmoothMatrix::rank_one(system[j - 1], dim));
    }
    out.push_back(std::move(p));
  }
  return out;
}

struct ProjectionDefects {
  double idempotent = 0;    // max ||P^2 - P||
  double selfadjoint = 0;   // max ||P - P^*||
  double orthogonal = 0;    // max ||P_k P_l||, k != l
};

inline ProjectionDefects projection_defects(const std::vector<SmoothMatrix>& ps) {
  ProjectionDefects d;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const auto& p = ps[k].dense();
    d.idempotent = std::max(d.idempotent, op_norm_q(SmoothMatrix(SmoothMatrix::Dense(p * p - p)), 0));
    d.selfadjoint = std::max(d.selfadjoint, op_norm_q(SmoothMatrix(SmoothMatrix::Dense(p - p.adjoint())), 0));
    for (std::size_t l = 0; l < ps.size(); ++l) {
      if (l == k) continue;
      d.orthogonal = std::max(d.orthogonal, op_norm_q(mat_mul(ps[k], ps[l]), 0));
    }
  }
  return d;
}

// ---------------------------------------------------------------------------

enum class RowNorm { l2, sup };

/// rows(k, q) = max_{j in N_k} |f_j|_q, tabulated for q <= Q.
class RowTable {
 public:
  RowTable(std::vector<std::vector<LogTower>> values, unsigned max_grade)
      : values_(std::make_shared<const std::vector<std::vector<LogTower>>>(std::move(values))), Q_(max_grade) {}

  std::size_t size() const { return values_->size(); }
  unsigned max_grade() const { return Q_; }

  LogTower operator()(std::size_t k, unsigned q) const {
    if (k < 1 || k > values_->size()) throw std::out_of_range("RowTable: row out of range");
    if (q > Q_) throw std::domain_error("RowTable: grade " + std::to_string(q) + " exceeds tabulated bound");
    return (*values_)[k - 1][q];
  }

  GradedRule rule() const {
    auto v = values_;
    const unsigned Q = Q_;
    return [v, Q](std::size_t k, unsigned q) {
      if (k < 1 || k > v->size()) throw std::out_of_range("RowTable: row out of range");
      if (q > Q) throw std::domain_error("RowTable: grade exceeds tabulated bound");
      return (*v)[k - 1][q];
    };
  }

 private:
  std::shared_ptr<const std::vector<std::vector<LogTower>>> values_;
  unsigned Q_;
};

inline RowTable subalgebra_rows(const OrthoSystem& system, const Partition& part, unsigned Q,
                                RowNorm norm = RowNorm::l2) {
  std::vector<std::vector<LogTower>> rows(part.classes.size(), std::vector<LogTower>(Q + 1));
  for (const auto& cls : part.classes) {
    for (std::size_t j : cls) {
      if (j < 1 || j > system.size()) {
        throw std::domain_error("subalgebra_rows: class index " + std::to_string(j) + " out of range");
      }
    }
  }
  parallel_for(part.classes.size(), [&](std::size_t k) {
    for (unsigned q = 0; q <= Q; ++q) {
      LogTower best;
      for (std::size_t j : part.classes[k]) {
        const SeqVector& f = system[j - 1];
        best = lt_max(best, norm == RowNorm::l2 ? s_norm(f, q) : sup_norm(f, q));
      }
      rows[k][q] = best;
    }
  }, 16);
  return RowTable(std::move(rows), Q);
}

/// Singleton classes {1}, {2}, ..., {K}.
inline Partition singleton_partition(std::size_t K) {
  Partition p;
  p.n = K;
  for (std::size_t k = 1; k <= K; ++k) p.classes.push_back({k});
  return p;
}

}  // namespace klab

#pragma once

// Köthe matrices and the seminorms of s, s' and lambda^p(A).

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klab/logtower.hpp"
#include "klab/seqvector.hpp"

namespace klab {

/// A rule (j, q) -> value, j >= 1, q >= 0. Used for Köthe matrices and for
/// the row systems k -> (q -> value) of the subalgebra representations.
using GradedRule = std::function<LogTower(std::size_t, unsigned)>;

/// Describes a_{j,q} = (scale * j)^q; enables integral tail bounds.
struct PowerLaw {
  double scale = 1.0;
};

struct ProbeBounds {
  std::size_t rows = 32;
  unsigned grades = 8;
};

class KoetheMatrix {
 public:
  /// Checks the Köthe axioms on the probe range: every row has a positive
  /// entry and every row is non-decreasing in q.
  KoetheMatrix(std::string name, GradedRule rule, std::optional<PowerLaw> law = std::nullopt,
               ProbeBounds probe = {})
      : name_(std::move(name)), rule_(std::move(rule)), law_(law) {
    if (!rule_) throw std::invalid_argument("KoetheMatrix: empty rule");
    for (std::size_t j = 1; j <= probe.rows; ++j) {
      bool positive = false;
      LogTower prev = rule_(j, 0);
      positive = !prev.is_zero();
      for (unsigned q = 1; q <= probe.grades; ++q) {
        LogTower cur = rule_(j, q);
        if (cur < prev) {
          throw std::invalid_argument("KoetheMatrix '" + name_ + "': row " + std::to_string(j) +
                                      " decreases at q=" + std::to_string(q));
        }
        positive = positive || !cur.is_zero();
        prev = cur;
      }
      if (!positive) {
        throw std::invalid_argument("KoetheMatrix '" + name_ + "': row " + std::to_string(j) +
                                    " vanishes on the probe range");
      }
    }
  }

  LogTower entry(std::size_t j, unsigned q) const {
    if (j == 0) throw std::domain_error("KoetheMatrix: row indices start at 1");
    return rule_(j, q);
  }
  const std::string& name() const { return name_; }
  const std::optional<PowerLaw>& power_law() const { return law_; }
  const GradedRule& rule() const { return rule_; }

 private:
  std::string name_;
  GradedRule rule_;
  std::optional<PowerLaw> law_;
};

/// (j^q): the canonical matrix of s.
inline const KoetheMatrix& power_matrix() {
  static const KoetheMatrix m(
      "power",
      [](std::size_t j, unsigned q) {
        return lt_pow(LogTower::from_real(static_cast<long double>(j)), q);
      },
      PowerLaw{1.0});
  return m;
}

/// ((s j)^q), s >= 1.
inline KoetheMatrix scaled_power_matrix(double scale) {
  if (!(scale >= 1.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("scaled_power_matrix: scale must be >= 1");
  }
  return KoetheMatrix(
      "scaled:" + std::to_string(scale),
      [scale](std::size_t j, unsigned q) {
        return lt_pow(LogTower::from_real(static_cast<long double>(scale) * j), q);
      },
      PowerLaw{scale});
}

/// (base^{j q}), base > 1.
inline KoetheMatrix exponential_matrix(double base) {
  if (!(base > 1.0) || !std::isfinite(base)) {
    throw std::invalid_argument("exponential_matrix: base must exceed 1");
  }
  return KoetheMatrix("exp:" + std::to_string(base), [base](std::size_t j, unsigned q) {
    return lt_pow(LogTower::from_real(base), static_cast<long double>(j) * q);
  });
}

/// (n_k^q) for a positive sequence n; rows beyond the list are rejected.
inline KoetheMatrix sequence_power_matrix(std::vector<LogTower> n, std::string name = "n_k^q") {
  for (const auto& v : n) {
    if (v < LogTower::one()) throw std::invalid_argument("sequence_power_matrix: n_k must be >= 1");
  }
  auto shared = std::make_shared<const std::vector<LogTower>>(std::move(n));
  const std::size_t len = shared->size();
  return KoetheMatrix(
      std::move(name),
      [shared](std::size_t k, unsigned q) {
        if (k == 0 || k > shared->size()) throw std::out_of_range("sequence_power_matrix: row out of range");
        return lt_pow((*shared)[k - 1], q);
      },
      std::nullopt, ProbeBounds{std::min<std::size_t>(len, 32), 8});
}

enum class LpExponent { one, two, infinity };

/// Maps p to the supported lambda^p exponents; p outside {1, 2, inf} is rejected.
inline LpExponent lp_exponent_from(double p) {
  if (p == 1.0) return LpExponent::one;
  if (p == 2.0) return LpExponent::two;
  if (std::isinf(p) && p > 0) return LpExponent::infinity;
  throw std::domain_error("only lambda^1, lambda^2 and lambda^inf seminorms are supported");
}

namespace detail {

template <class Weight>
LogTower weighted_norm(const SeqVector& x, LpExponent p, Weight&& weight) {
  auto idx = x.support();
  auto val = x.values();
  LogTower acc;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const LogTower term = lt_mul(LogTower::from_real(std::abs(val[i])), weight(idx[i]));
    switch (p) {
      case LpExponent::infinity:
        acc = lt_max(acc, term);
        break;
      case LpExponent::one:
        acc = lt_add(acc, term);
        break;
      case LpExponent::two:
        acc = lt_add(acc, lt_mul(term, term));
        break;
    }
  }
  if (p == LpExponent::two && !acc.is_zero()) acc = lt_pow(acc, 0.5L);
  return acc;
}

}  // namespace detail

/// |x|_{p,q} of lambda^p(A): sup_j |x_j| a_{j,q} for p = inf,
/// (sum_j (|x_j| a_{j,q})^p)^{1/p} otherwise.
inline LogTower seminorm(const SeqVector& x, const KoetheMatrix& a, LpExponent p, unsigned q) {
  return detail::weighted_norm(x, p, [&](std::size_t j) { return a.entry(j, q); });
}

/// |x|_q = (sum |x_j|^2 j^{2q})^{1/2}, the norms of s.
inline LogTower s_norm(const SeqVector& x, unsigned q) {
  return seminorm(x, power_matrix(), LpExponent::two, q);
}

/// |x|'_q = (sum |x_j|^2 j^{-2q})^{1/2}, the norms of s'.
inline LogTower s_dual_norm(const SeqVector& x, unsigned q) {
  return detail::weighted_norm(x, LpExponent::two, [q](std::size_t j) {
    return lt_pow(LogTower::from_real(static_cast<long double>(j)), -static_cast<long double>(q));
  });
}

/// |x|_{inf,q} = sup_j |x_j| j^q.
inline LogTower sup_norm(const SeqVector& x, unsigned q) {
  return seminorm(x, power_matrix(), LpExponent::infinity, q);
}

}  // namespace klab

#pragma once

// Explicit objects: the alpha-product supremum, the integer sequence (b_k)
// squeezed between a_k / C and C a_k^2, block Hadamard systems, and the
// prime tower system whose sup-norm ratios diverge.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klab/certificate.hpp"
#include "klab/checks.hpp"
#include "klab/koethe.hpp"
#include "klab/logtower.hpp"
#include "klab/seqvector.hpp"
#include "klab/smoothops.hpp"
#include "klab/subalgebra.hpp"

namespace klab {

// ---------------------------------------------------------------------------
// log-domain helpers

/// A signed sum of logarithms kept as separate positive and negative parts,
/// so that large cancelling terms are only combined once, at the end.
struct SplitLog {
  LogTower pos;
  LogTower neg;

  void add(const SignedTower& term, long double mult = 1) {
    if (mult == 0 || term.is_zero()) return;
    const SignedTower s = signed_scale(term, mult);
    if (s.negative) {
      neg = lt_add(neg, s.magnitude);
    } else {
      pos = lt_add(pos, s.magnitude);
    }
  }
  SignedTower value() const { return signed_add({false, pos}, {true, neg}); }
  LogTower exp() const { return lt_exp(value()); }
};

inline bool signed_less(const SignedTower& a, const SignedTower& b) {
  if (a.negative != b.negative) return a.negative && !(a.is_zero() && b.is_zero());
  return a.negative ? b.magnitude < a.magnitude : a.magnitude < b.magnitude;
}

/// Absolute difference at most tol for magnitudes up to 1, otherwise relative
/// difference of the top-level components at most tol.
inline bool log_close(const SignedTower& a, const SignedTower& b, long double tol) {
  const LogTower one = LogTower::one();
  if (a.magnitude <= one && b.magnitude <= one) {
    return signed_add(a, -b).magnitude <= LogTower::from_real(tol);
  }
  if (a.negative != b.negative) return false;
  return top_level_relative_gap(a.magnitude, b.magnitude) <= tol;
}

/// base^exponent for base > 1 with a tower-valued exponent.
inline LogTower lt_pow_tower(const LogTower& base, const LogTower& exponent) {
  const SignedTower lb = lt_log(base);
  if (lb.negative || lb.is_zero()) throw std::domain_error("lt_pow_tower: base must exceed 1");
  return lt_exp({false, lt_mul(exponent, lb.magnitude)});
}

// ---------------------------------------------------------------------------
// alpha-product supremum

struct SupResult {
  LogTower value;
  std::size_t argmax = 0;
};

/// Relative tolerance (on logarithms) under which two candidates tie.
inline constexpr long double kTieTolerance = 1e-12L;

/// sup_{j <= J} alpha_j^{p-j+1} prod_{i<j} alpha_i, smallest attaining j.
inline SupResult alphas_sup(std::span<const LogTower> alpha, std::size_t p, std::size_t J) {
  if (p < 1) throw std::domain_error("alphas_sup: p must be positive");
  if (p > J) throw std::domain_error("alphas_sup: p exceeds the enumeration bound J");
  if (alpha.size() < J) throw std::domain_error("alphas_sup: fewer than J terms supplied");
  for (std::size_t i = 0; i < J; ++i) {
    if (alpha[i].is_zero()) throw std::domain_error("alphas_sup: alpha must be positive");
    if (i > 0 && alpha[i] < alpha[i - 1]) throw std::domain_error("alphas_sup: alpha must be non-decreasing");
  }
  SplitLog prefix;
  SignedTower best;
  std::size_t argmax = 0;
  for (std::size_t j = 1; j <= J; ++j) {
    const SignedTower la = lt_log(alpha[j - 1]);
    SplitLog cand = prefix;
    cand.add(la, static_cast<long double>(p) - static_cast<long double>(j) + 1);
    const SignedTower v = cand.value();
    if (argmax == 0 || (signed_less(best, v) && !log_close(best, v, kTieTolerance))) {
      best = v;
      argmax = j;
    }
    prefix.add(la);
  }
  return {lt_exp(best), argmax};
}

inline SupResult alphas_sup(std::span<const double> alpha, std::size_t p, std::size_t J) {
  std::vector<LogTower> t;
  t.reserve(alpha.size());
  for (double a : alpha) {
    if (!(a > 0) || !std::isfinite(a)) throw std::domain_error("alphas_sup: alpha must be positive and finite");
    t.push_back(LogTower::from_real(a));
  }
  return alphas_sup(std::span<const LogTower>(t), p, J);
}

// ---------------------------------------------------------------------------
// (a_k) -> (b_k)

namespace detail {

using boost::multiprecision::cpp_int;

/// Exact value mant * 2^exp of a double.
struct Dyadic {
  cpp_int mant;
  int exp = 0;
};

inline Dyadic to_dyadic(double a) {
  int e = 0;
  const double f = std::frexp(a, &e);
  return {cpp_int(static_cast<long long>(std::ldexp(f, 53))), e - 53};
}

inline Dyadic square(const Dyadic& d) { return {d.mant * d.mant, 2 * d.exp}; }

/// Brings x (integer) and d to a common scale: returns (x', m') with x/d = x'/m'.
inline std::pair<cpp_int, cpp_int> align(const cpp_int& x, const Dyadic& d) {
  if (d.exp >= 0) return {x, d.mant << d.exp};
  return {x << -d.exp, d.mant};
}

inline int cmp(const cpp_int& x, const Dyadic& d) {
  auto [l, r] = align(x, d);
  return l < r ? -1 : (l > r ? 1 : 0);
}

inline int cmp(const Dyadic& a, const Dyadic& b) {
  const int e = std::min(a.exp, b.exp);
  const cpp_int l = a.mant << (a.exp - e);
  const cpp_int r = b.mant << (b.exp - e);
  return l < r ? -1 : (l > r ? 1 : 0);
}

inline cpp_int ceil_div(const cpp_int& num, const cpp_int& den) { return (num + den - 1) / den; }

inline cpp_int ceil(const Dyadic& d) {
  if (d.exp >= 0) return d.mant << d.exp;
  return ceil_div(d.mant, cpp_int(1) << -d.exp);
}

/// ceil(d / k)
inline cpp_int ceil_over(const Dyadic& d, const cpp_int& k) {
  if (d.exp >= 0) return ceil_div(d.mant << d.exp, k);
  return ceil_div(d.mant, k << -d.exp);
}

/// ceil(k / d)
inline cpp_int ceil_under(const cpp_int& k, const Dyadic& d) {
  if (d.exp >= 0) return ceil_div(k, d.mant << d.exp);
  return ceil_div(k << -d.exp, d.mant);
}

}  // namespace detail

struct BkResult {
  std::vector<std::uint64_t> b;
  std::uint64_t C = 1;
  std::size_t k0 = 0;
};

/// Strictly increasing integers with a_k / C <= b_k <= C a_k^2. C is chosen
/// automatically when not given (the least admissible integer, raised until
/// every bound verifies exactly).
inline BkResult build_bk(std::span<const double> a, std::size_t k0, std::optional<std::uint64_t> C = std::nullopt) {
  using detail::cpp_int;
  const std::size_t n = a.size();
  if (k0 > n) throw std::domain_error("build_bk: k0 exceeds the input length");
  std::vector<detail::Dyadic> d;
  d.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double v = a[k - 1];
    if (!std::isfinite(v) || v < 1) {
      throw std::domain_error("build_bk: a_k must be finite and >= 1 (fails at k=" + std::to_string(k) + ")");
    }
    if (k > 1 && v < a[k - 2]) {
      throw std::domain_error("build_bk: a must be non-decreasing (fails at k=" + std::to_string(k) + ")");
    }
    if (k > k0 && v < 2.0 * static_cast<double>(k)) {
      throw std::domain_error("build_bk: a_k >= 2k required for k > k0 (fails at k=" + std::to_string(k) + ")");
    }
    d.push_back(detail::to_dyadic(v));
  }

  cpp_int c0 = 1;
  if (C) {
    if (*C < 1) throw std::domain_error("build_bk: C must be a positive integer");
    const cpp_int cc = *C;
    for (std::size_t k = 1; k <= k0; ++k) {
      // a_k / C <= k <= C a_k^2
      if (detail::cmp(cc * k, d[k - 1]) < 0 || detail::cmp(cpp_int(k), detail::Dyadic{cc * detail::square(d[k - 1]).mant,
                                                                                         2 * d[k - 1].exp}) > 0) {
        throw std::domain_error("build_bk: (1/C) a_k <= k <= C a_k^2 fails at k=" + std::to_string(k));
      }
    }
    c0 = cc;
  } else {
    for (std::size_t k = 1; k <= k0; ++k) {
      c0 = std::max(c0, detail::ceil_over(d[k - 1], cpp_int(k)));
      c0 = std::max(c0, detail::ceil_under(cpp_int(k), detail::square(d[k - 1])));
    }
  }

  const cpp_int u64max = std::numeric_limits<std::uint64_t>::max();
  for (cpp_int c = c0;; ++c) {
    std::vector<cpp_int> b(n);
    for (std::size_t k = 1; k <= k0; ++k) b[k - 1] = k;
    std::size_t m = k0 + 1;
    while (m <= n) {
      std::size_t end = m;
      while (end < n && a[end] == a[m - 1]) ++end;  // group of equal values [m, end]
      detail::Dyadic top = d[m - 1];
      if (m >= 2) {
        const detail::Dyadic prev_sq = detail::square(d[m - 2]);
        if (detail::cmp(prev_sq, top) > 0) top = prev_sq;
      }
      const cpp_int base = c * detail::ceil(top);
      for (std::size_t k = m; k <= end; ++k) b[k - 1] = base + (k - m + 1);
      m = end + 1;
    }
    bool ok = true;
    for (std::size_t k = 1; k <= n && ok; ++k) {
      const detail::Dyadic ca2{c * detail::square(d[k - 1]).mant, 2 * d[k - 1].exp};
      ok = detail::cmp(c * b[k - 1], d[k - 1]) >= 0 && detail::cmp(b[k - 1], ca2) <= 0 &&
           (k == 1 || b[k - 1] > b[k - 2]);
    }
    if (ok) {
      BkResult out;
      out.k0 = k0;
      if (c > u64max) throw std::domain_error("build_bk: C overflows 64 bits");
      out.C = static_cast<std::uint64_t>(c);
      out.b.reserve(n);
      for (std::size_t k = 1; k <= n; ++k) {
        if (b[k - 1] > u64max) throw std::domain_error("build_bk: b_k overflows 64 bits at k=" + std::to_string(k));
        out.b.push_back(static_cast<std::uint64_t>(b[k - 1]));
      }
      return out;
    }
    if (C) throw std::domain_error("build_bk: bounds fail for the supplied C");
    if (c > c0 + 64) throw std::logic_error("build_bk: no admissible C found");
  }
}

/// Exact check of a_k / C <= b_k <= C a_k^2 and strict monotonicity.
inline bool bk_bounds_hold(std::span<const double> a, std::span<const std::uint64_t> b, std::uint64_t C) {
  using detail::cpp_int;
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto d = detail::to_dyadic(a[k]);
    const cpp_int bk = b[k];
    if (detail::cmp(cpp_int(C) * bk, d) < 0) return false;
    if (detail::cmp(bk, detail::Dyadic{cpp_int(C) * detail::square(d).mant, 2 * d.exp}) > 0) return false;
    if (k > 0 && b[k] <= b[k - 1]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Hadamard systems

/// d_n = n until the blocks hold at least K vectors.
inline std::vector<unsigned> linear_schedule(std::size_t K) {
  std::vector<unsigned> d;
  std::size_t total = 0;
  for (unsigned n = 1; total < K; ++n) {
    if (n > 40) throw std::domain_error("linear_schedule: K too large");
    d.push_back(n);
    total += std::size_t{1} << n;
  }
  return d;
}

struct HadamardBlock {
  std::size_t block = 0;   // n, 1-based
  unsigned d = 0;          // d_n
  std::size_t offset = 0;  // S_{n-1}
  std::size_t end = 0;     // S_n
};

/// Locates row k (1-based) in the block schedule.
inline HadamardBlock hadamard_block(std::span<const unsigned> d, std::size_t k) {
  std::size_t offset = 0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    if (d[n] > 40) throw std::domain_error("hadamard: block exponent too large");
    const std::size_t size = std::size_t{1} << d[n];
    if (k <= offset + size) return {n + 1, d[n], offset, offset + size};
    offset += size;
  }
  throw std::domain_error("hadamard: K exceeds the total block size");
}

/// First K rows of diag(2^{-d_1/2} H_{2^{d_1}}, 2^{-d_2/2} H_{2^{d_2}}, ...).
inline OrthoSystem hadamard_system(std::span<const unsigned> d, std::size_t K) {
  if (K == 0) throw std::domain_error("hadamard_system: K must be positive");
  hadamard_block(d, K);  // range check
  std::vector<SeqVector> rows;
  rows.reserve(K);
  for (std::size_t k = 1; k <= K; ++k) {
    const HadamardBlock b = hadamard_block(d, k);
    const std::size_t size = b.end - b.offset;
    const double scale = std::ldexp(1.0, -static_cast<int>(b.d / 2)) * (b.d % 2 ? std::sqrt(0.5) : 1.0);
    const std::size_t i = k - b.offset - 1;
    std::vector<std::size_t> idx(size);
    std::vector<Complex> val(size);
    for (std::size_t j = 0; j < size; ++j) {
      idx[j] = b.offset + j + 1;
      val[j] = (std::popcount(i & j) % 2 ? -scale : scale);
    }
    rows.emplace_back(std::move(idx), std::move(val));
  }
  return OrthoSystem(std::move(rows));
}

/// |f_k|_{inf,q} = 2^{-d_n/2} S_n^q.
inline LogTower hadamard_supnorm_closed(std::span<const unsigned> d, std::size_t k, unsigned q) {
  const HadamardBlock b = hadamard_block(d, k);
  return lt_mul(lt_pow(LogTower::from_real(2), -0.5L * b.d),
                lt_pow(LogTower::from_real(static_cast<long double>(b.end)), q));
}

/// 2^{d_n (q - 1/2)} S_n^{-q}.
inline LogTower hadamard_ratio_closed(std::span<const unsigned> d, std::size_t k, unsigned q) {
  const HadamardBlock b = hadamard_block(d, k);
  return lt_mul(lt_pow(LogTower::from_real(2), static_cast<long double>(b.d) * (q - 0.5L)),
                lt_pow(LogTower::from_real(static_cast<long double>(b.end)), -static_cast<long double>(q)));
}

struct HadamardReportOptions {
  /// Weight w(j) used by the enumeration side, sup_j |f_k(j)| w(j)^q.
  /// Defaults to w(j) = j; overriding it is a negative control.
  std::function<long double(std::size_t)> weight;
  long double agreement = 1e-9L;
};

/// |f_k|_{inf,q} / |f_k|_{inf,1}^{2q} <= 1 for k <= K, q <= Q, by closed form
/// and by enumeration over the actual rows.
inline Certificate hadamard_condition_report(std::span<const unsigned> d, std::size_t K, unsigned Q,
                                             HadamardReportOptions opt = {}) {
  const OrthoSystem sys = hadamard_system(d, K);
  auto weight = opt.weight ? opt.weight : [](std::size_t j) { return static_cast<long double>(j); };
  auto enumerate = [&](const SeqVector& f, unsigned q) {
    LogTower best;
    auto idx = f.support();
    auto val = f.values();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      best = lt_max(best, lt_mul(LogTower::from_real(std::abs(val[i])),
                                 lt_pow(LogTower::from_real(weight(idx[i])), q)));
    }
    return best;
  };

  Certificate cert;
  cert.condition = "hadamard_condition_iv";
  cert.bounds = {{"K", static_cast<std::int64_t>(K)}, {"Q", Q}};
  cert.constants["p"] = LogTower::from_real(1);
  cert.constants["C"] = LogTower::from_real(1);

  struct Cell {
    LogTower lhs, rhs, closed, enumerated;
    long double gap = 0;
  };
  std::vector<std::vector<Cell>> grid(K, std::vector<Cell>(Q + 1));
  parallel_for(K, [&](std::size_t i) {
    const std::size_t k = i + 1;
    const LogTower one_norm = enumerate(sys[i], 1);
    for (unsigned q = 0; q <= Q; ++q) {
      Cell& c = grid[i][q];
      c.lhs = enumerate(sys[i], q);
      c.rhs = lt_pow(one_norm, 2.0L * q);
      c.enumerated = lt_div(c.lhs, c.rhs);
      c.closed = hadamard_ratio_closed(d, k, q);
      c.gap = top_level_relative_gap(c.closed, c.enumerated);
    }
  }, 16);

  bool agree = true;
  bool bounded = true;
  LogTower worst;
  std::string diagnostic;
  for (unsigned q = 0; q <= Q; ++q) {
    std::size_t arg = 0;
    for (std::size_t i = 0; i < K; ++i) {
      const Cell& c = grid[i][q];
      if (c.gap > opt.agreement && agree) {
        agree = false;
        diagnostic = "closed form and enumeration disagree at k=" + std::to_string(i + 1) + ", q=" +
                     std::to_string(q) + " (closed " + c.closed.to_string() + ", enumerated " +
                     c.enumerated.to_string() + ")";
      }
      if (c.closed > LogTower::one() && !lt_close(c.closed, LogTower::one(), kStabilitySlack)) bounded = false;
      if (c.closed > grid[arg][q].closed) arg = i;
    }
    worst = lt_max(worst, grid[arg][q].closed);
    cert.constants["q" + std::to_string(q) + ".r"] = LogTower::from_real(2.0L * q);
    cert.witnesses.push_back({{{"k", static_cast<std::int64_t>(arg + 1)}, {"q", q}, {"r", 2 * static_cast<std::int64_t>(q)}},
                              grid[arg][q].lhs,
                              grid[arg][q].rhs});
  }
  cert.constants["max_ratio"] = worst;
  if (!agree) {
    cert.status = Status::inconclusive;
    cert.notes = diagnostic;
  } else if (!bounded) {
    cert.status = Status::inconclusive;
    cert.notes = "some ratio exceeds 1";
  } else {
    cert.status = Status::verified_to_depth;
    cert.notes = "p=1, C=1, r=2q";
  }
  return cert;
}

// ---------------------------------------------------------------------------
// prime tower system

inline std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 2; out.size() < count; ++c) {
    bool prime = true;
    for (std::uint64_t p : out) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(c);
  }
  return out;
}

inline constexpr std::size_t kTowerMaxK = 12;
inline constexpr std::size_t kTowerMaxJ = 8;

/// N_{k,1} = m_k (k-th prime), N_{k,j+1} = m_k^{N_{k,j}}, and
/// a_{k,j} = c_k prod_{i<j} N_{k,i} / N_{k,j}^{j-1} with unit l2 norm over j <= J.
struct TowerSystem {
  std::size_t K = 0;
  std::size_t J = 0;
  std::vector<std::uint64_t> m;
  std::vector<std::vector<LogTower>> N;     // [k][j], j = 1..J+1
  std::vector<std::vector<LogTower>> logN;  // ln N_{k,j}
  std::vector<LogTower> c;
  std::vector<std::vector<LogTower>> a;     // [k][j], j = 1..J
  /// Bound on the discarded sum_{j>J} t_j^2 relative to the kept sum.
  std::vector<LogTower> tail_bound;

  const LogTower& n_at(std::size_t k, std::size_t j) const { return N.at(k - 1).at(j - 1); }
  const LogTower& a_at(std::size_t k, std::size_t j) const { return a.at(k - 1).at(j - 1); }
  const LogTower& c_at(std::size_t k) const { return c.at(k - 1); }
};

/// c_k^{c_exp} prod_j N_{k,j}^{e_j}; exponents are combined before evaluation.
struct TowerMonomial {
  long double c_exp = 0;
  std::vector<long double> e;  // e[j-1] multiplies ln N_{k,j}

  TowerMonomial& times_n(std::size_t j, long double power) {
    if (e.size() < j) e.resize(j, 0);
    e[j - 1] += power;
    return *this;
  }
  TowerMonomial& times(const TowerMonomial& o, long double power = 1) {
    c_exp += power * o.c_exp;
    if (e.size() < o.e.size()) e.resize(o.e.size(), 0);
    for (std::size_t j = 0; j < o.e.size(); ++j) e[j] += power * o.e[j];
    return *this;
  }
};

namespace detail {

inline SplitLog tower_log(const TowerSystem& sys, std::size_t k, const TowerMonomial& mono, bool with_c = true) {
  SplitLog s;
  if (mono.e.size() > sys.J + 1) throw std::domain_error("tower monomial exceeds the system depth");
  for (std::size_t j = 0; j < mono.e.size(); ++j) s.add({false, sys.logN[k - 1][j]}, mono.e[j]);
  if (with_c && mono.c_exp != 0) s.add(lt_log(sys.c[k - 1]), mono.c_exp);
  return s;
}

/// t_j = prod_{i<j} N_i / N_j^{j-1}
inline TowerMonomial t_monomial(std::size_t j) {
  TowerMonomial m;
  for (std::size_t i = 1; i < j; ++i) m.times_n(i, 1);
  m.times_n(j, -static_cast<long double>(j - 1));
  return m;
}

}  // namespace detail

inline LogTower evaluate(const TowerSystem& sys, std::size_t k, const TowerMonomial& mono) {
  if (k < 1 || k > sys.K) throw std::out_of_range("tower: k out of range");
  return detail::tower_log(sys, k, mono).exp();
}

/// a_{k,j} as a monomial.
inline TowerMonomial tower_coefficient(std::size_t j) {
  TowerMonomial m = detail::t_monomial(j);
  m.c_exp = 1;
  return m;
}

inline TowerSystem tower_system(std::size_t K, std::size_t J) {
  if (K < 1 || K > kTowerMaxK) throw std::domain_error("tower_system: K must lie in [1, 12]");
  if (J < 1 || J > kTowerMaxJ) throw std::domain_error("tower_system: J must lie in [1, 8]");
  TowerSystem sys;
  sys.K = K;
  sys.J = J;
  sys.m = first_primes(K);
  sys.N.assign(K, {});
  sys.logN.assign(K, {});
  sys.c.assign(K, {});
  sys.a.assign(K, {});
  sys.tail_bound.assign(K, {});
  parallel_for(K, [&](std::size_t i) {
    const LogTower m = LogTower::from_real(static_cast<long double>(sys.m[i]));
    const LogTower lnm = lt_log(m).magnitude;
    auto& N = sys.N[i];
    auto& L = sys.logN[i];
    N.push_back(m);
    L.push_back(lnm);
    for (std::size_t j = 1; j <= J; ++j) {
      L.push_back(lt_mul(N.back(), lnm));  // ln N_{j+1} = N_j ln m
      N.push_back(lt_exp({false, L.back()}));
    }
    LogTower sum;
    for (std::size_t j = 1; j <= J; ++j) {
      TowerMonomial sq = detail::t_monomial(j);
      sq = TowerMonomial{}.times(sq, 2);
      sum = lt_add(sum, detail::tower_log(sys, i + 1, sq, false).exp());
    }
    sys.c[i] = lt_pow(sum, -0.5L);
    for (std::size_t j = 1; j <= J; ++j) sys.a[i].push_back(evaluate(sys, i + 1, tower_coefficient(j)));
    // sum_{j>J} t_j^2 <= N_1^2 sum_{j>J} N_j^{-2} <= (4/3) N_1^2 / N_{J+1}^2
    sys.tail_bound[i] = lt_mul(LogTower::from_real(4.0L / 3.0L),
                               lt_pow(lt_div(N.front(), N.back()), 2));
  }, 1);
  return sys;
}

/// |f_k|_{inf,p} = a_{k,p} N_{k,p}^p = c_k prod_{i<=p} N_{k,i}.
inline TowerMonomial tower_supnorm_monomial(std::size_t p) {
  TowerMonomial m;
  m.c_exp = 1;
  for (std::size_t i = 1; i <= p; ++i) m.times_n(i, 1);
  return m;
}

inline LogTower tower_supnorm(const TowerSystem& sys, std::size_t k, std::size_t p) {
  if (p > sys.J) throw std::domain_error("tower_supnorm: p exceeds the system depth");
  return evaluate(sys, k, tower_supnorm_monomial(p));
}

/// sup_{j <= J} a_{k,j} N_{k,j}^p by direct enumeration; smallest attaining j.
inline SupResult tower_supnorm_enumerated(const TowerSystem& sys, std::size_t k, std::size_t p) {
  SignedTower best;
  std::size_t arg = 0;
  for (std::size_t j = 1; j <= sys.J; ++j) {
    TowerMonomial term = tower_coefficient(j);
    term.times_n(j, static_cast<long double>(p));
    const SignedTower v = detail::tower_log(sys, k, term).value();
    if (arg == 0 || (signed_less(best, v) && !log_close(best, v, kTieTolerance))) {
      best = v;
      arg = j;
    }
  }
  return {lt_exp(best), arg};
}

inline GradedRule tower_rows(const TowerSystem& sys) {
  auto shared = std::make_shared<const TowerSystem>(sys);
  return [shared](std::size_t k, unsigned q) { return tower_supnorm(*shared, k, q); };
}

/// R(k,p,r) = |f_k|_{inf,p+1} / |f_k|_{inf,p}^r.
inline TowerMonomial divergence_monomial(std::size_t p, std::size_t r) {
  TowerMonomial m = tower_supnorm_monomial(p + 1);
  m.times(tower_supnorm_monomial(p), -static_cast<long double>(r));
  return m;
}

/// N_{k,p+1} / N_{k,p}^{p r}.
inline TowerMonomial divergence_lower_bound(std::size_t p, std::size_t r) {
  TowerMonomial m;
  m.times_n(p + 1, 1);
  m.times_n(p, -static_cast<long double>(p * r));
  return m;
}

/// R(k,p,r) for 1 <= p <= P, 1 <= r <= R, k <= K: strictly increasing in k
/// and bounded below by N_{k,p+1}/N_{k,p}^{pr} gives a candidate refutation.
inline Certificate divergence_report(const TowerSystem& sys, std::size_t P, std::size_t R) {
  if (P < 1 || R < 1) throw std::domain_error("divergence_report: P and R must be positive");
  if (P + 1 > sys.J) throw std::domain_error("divergence_report: P + 1 exceeds the system depth");
  if (sys.K < 2) throw std::domain_error("divergence_report: need at least two vectors");
  Certificate cert;
  cert.condition = "tower_divergence";
  cert.bounds = {{"P", static_cast<std::int64_t>(P)}, {"R", static_cast<std::int64_t>(R)},
                 {"K", static_cast<std::int64_t>(sys.K)}, {"J", static_cast<std::int64_t>(sys.J)}};
  // Growth is eventual: R(k, p, r) must increase strictly from some onset k
  // no later than the middle of the range.
  const std::size_t latest_onset = (sys.K + 1) / 2;
  bool increasing = true;
  bool bounded_below = true;
  std::size_t worst_onset = 1;
  std::string why;
  for (std::size_t p = 1; p <= P; ++p) {
    for (std::size_t r = 1; r <= R; ++r) {
      const TowerMonomial num = tower_supnorm_monomial(p + 1);
      const TowerMonomial den = TowerMonomial{}.times(tower_supnorm_monomial(p), static_cast<long double>(r));
      LogTower prev;
      std::size_t onset = 1;
      for (std::size_t k = 1; k <= sys.K; ++k) {
        const LogTower ratio = evaluate(sys, k, divergence_monomial(p, r));
        const LogTower lb = evaluate(sys, k, divergence_lower_bound(p, r));
        if (ratio < lb && !lt_close(ratio, lb, kStabilitySlack)) {
          bounded_below = false;
          if (why.empty()) why = "lower bound fails at k=" + std::to_string(k);
        }
        if (k > 1 && !(ratio > prev)) onset = k;
        prev = ratio;
        cert.witnesses.push_back({{{"p", static_cast<std::int64_t>(p)},
                                   {"r", static_cast<std::int64_t>(r)},
                                   {"k", static_cast<std::int64_t>(k)}},
                                  evaluate(sys, k, num),
                                  evaluate(sys, k, den)});
      }
      worst_onset = std::max(worst_onset, onset);
      if (onset > latest_onset) {
        increasing = false;
        if (why.empty()) {
          why = "R(k," + std::to_string(p) + "," + std::to_string(r) + ") not increasing at k=" + std::to_string(onset);
        }
      }
    }
  }
  LogTower tail;
  for (const auto& t : sys.tail_bound) tail = lt_max(tail, t);
  cert.constants["tail_bound"] = tail;
  cert.constants["truncation_depth"] = LogTower::from_real(static_cast<long double>(sys.J));
  cert.constants["onset"] = LogTower::from_real(static_cast<long double>(worst_onset));
  if (increasing && bounded_below) {
    cert.status = Status::candidate_refutation;
    cert.notes = worst_onset == 1 ? "ratio strictly increasing in k for every tested (p, r)"
                                  : "ratio strictly increasing in k from k=" + std::to_string(worst_onset) +
                                        " for every tested (p, r)";
  } else {
    cert.status = Status::inconclusive;
    cert.notes = why;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// from a row system to an explicit embedding candidate

struct EmbeddingOptions {
  IsoBounds bounds{};
  std::optional<unsigned> p1;        // grade used to build n_k; searched when unset
  unsigned max_p1 = 8;
  std::optional<std::size_t> k0;     // searched when unset
  std::optional<std::uint64_t> C;    // searched when unset
};

struct EmbeddingReport {
  unsigned p1 = 0;
  std::vector<std::size_t> sigma;
  BkResult bk;
  Certificate alpha;
  Certificate beta;
};

/// Orders the rows by rows(., p1), builds n_k between a_k / C and C a_k^2
/// from a_k = rows(sigma(k), p1), and checks (alpha) and (beta) against n_k^q.
inline EmbeddingReport embedding_check(const GradedRule& rows, std::size_t K, EmbeddingOptions opt = {}) {
  if (K < 4) throw std::domain_error("embedding_check: K must be at least 4");
  auto prepare = [&](unsigned p1) {
    std::vector<std::size_t> order(K);
    std::vector<LogTower> vals(K);
    for (std::size_t k = 1; k <= K; ++k) vals[k - 1] = rows(k, p1);
    std::iota(order.begin(), order.end(), std::size_t{1});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return vals[x - 1] < vals[y - 1]; });
    std::vector<double> a(K);
    for (std::size_t k = 0; k < K; ++k) a[k] = static_cast<double>(vals[order[k] - 1].to_real());
    return std::make_pair(order, a);
  };
  auto admissible = [&](const std::vector<double>& a) {
    if (!std::isfinite(a.back()) || a.front() < 1) return false;
    for (std::size_t k = K / 2 + 1; k <= K; ++k) {
      if (a[k - 1] < 2.0 * static_cast<double>(k)) return false;
    }
    return true;
  };

  EmbeddingReport rep;
  std::vector<double> a;
  if (opt.p1) {
    rep.p1 = *opt.p1;
    std::tie(rep.sigma, a) = prepare(rep.p1);
  } else {
    bool found = false;
    for (unsigned p1 = 0; p1 <= opt.max_p1 && !found; ++p1) {
      auto [s, v] = prepare(p1);
      if (admissible(v)) {
        rep.p1 = p1;
        rep.sigma = std::move(s);
        a = std::move(v);
        found = true;
      }
    }
    if (!found) throw std::domain_error("embedding_check: no grade p1 <= max_p1 gives a_k >= 2k on the final half");
  }
  std::size_t k0 = 0;
  if (opt.k0) {
    k0 = *opt.k0;
  } else {
    for (std::size_t k = K; k >= 1; --k) {
      if (a[k - 1] < 2.0 * static_cast<double>(k)) {
        k0 = k;
        break;
      }
    }
  }
  rep.bk = build_bk(a, k0, opt.C);
  std::vector<std::size_t> n(rep.bk.b.begin(), rep.bk.b.end());
  std::tie(rep.alpha, rep.beta) = iso_check(rows, n, rep.sigma, opt.bounds);
  return rep;
}

}  // namespace klab

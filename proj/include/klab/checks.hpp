#pragma once

// Depth-limited checkers: Grothendieck-Pietsch nuclearity, matrix
// equivalence along a bijection, the dominating-norm inequality, and the
// grade-domination condition on row systems.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klab/certificate.hpp"
#include "klab/koethe.hpp"
#include "klab/logtower.hpp"
#include "klab/parallel.hpp"
#include "klab/seqvector.hpp"

namespace klab {

/// Relative slack used when comparing a tail maximum against a head maximum.
inline constexpr long double kStabilitySlack = 1e-12L;

/// Summary of a ratio sequence over the tested index range. An empty
/// optional stands for an infinite ratio (positive over zero).
struct RatioProfile {
  bool finite = true;
  LogTower max;
  std::size_t argmax = 0;
  /// The maximum is already attained on the first quarter of the range and
  /// the final window does not rise above the window ending at the quarter
  /// mark. Windows are n/8 wide so that ratios alternating between index
  /// classes are not mistaken for a trend.
  bool stable = false;
  /// Not stable, non-decreasing over the last half and ending at the overall
  /// maximum.
  bool growing = false;
};

inline RatioProfile profile_ratios(std::span<const std::optional<LogTower>> r) {
  const std::size_t n = r.size();
  if (n < 4) throw std::domain_error("profile_ratios: need at least 4 samples");
  RatioProfile out;
  for (const auto& x : r) {
    if (!x) {
      out.finite = false;
      return out;
    }
  }
  const std::size_t quarter = n / 4;
  LogTower head, rest;
  for (std::size_t i = 0; i < n; ++i) {
    const LogTower& v = *r[i];
    if (i == 0 || v > out.max) {
      out.max = v;
      out.argmax = i;
    }
    if (i < quarter) {
      head = lt_max(head, v);
    } else {
      rest = lt_max(rest, v);
    }
  }
  auto not_above = [](const LogTower& x, const LogTower& y) { return x <= y || lt_close(x, y, kStabilitySlack); };
  const std::size_t w = std::max<std::size_t>(1, n / 8);
  auto window_max = [&](std::size_t end) {  // max over (end - w, end]
    LogTower m = *r[end];
    for (std::size_t i = end + 1 - std::min(w, end + 1); i < end; ++i) m = lt_max(m, *r[i]);
    return m;
  };
  out.stable = not_above(rest, head) && not_above(window_max(n - 1), window_max(quarter));
  if (!out.stable) {
    bool monotone = true;
    for (std::size_t i = n / 2 + 1; i < n && monotone; ++i) monotone = *r[i] >= *r[i - 1];
    out.growing = monotone && *r[n - 1] >= out.max;
  }
  return out;
}

namespace detail {

inline std::optional<LogTower> safe_ratio(const LogTower& num, const LogTower& den) {
  if (den.is_zero()) {
    if (num.is_zero()) return LogTower{};
    return std::nullopt;
  }
  return lt_div(num, den);
}

using Table = std::vector<std::vector<LogTower>>;  // [grade][index]

inline Table fill_table(std::size_t n, unsigned grades,
                        const std::function<LogTower(std::size_t, unsigned)>& f) {
  Table t(grades + 1, std::vector<LogTower>(n));
  parallel_for(n, [&](std::size_t i) {
    for (unsigned g = 0; g <= grades; ++g) t[g][i] = f(i + 1, g);
  }, 64);
  return t;
}

/// Up to four indices spread over the last half of [0, n).
inline std::vector<std::size_t> tail_samples(std::size_t n) {
  const std::size_t h = n / 2;
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < 4; ++t) {
    const std::size_t i = h + (n - 1 - h) * t / 3;
    if (out.empty() || out.back() != i) out.push_back(i);
  }
  return out;
}

struct Domination {
  Status status = Status::inconclusive;
  std::vector<std::optional<std::pair<unsigned, LogTower>>> found;  // per universal grade
  std::optional<unsigned> refuted_at;
  std::vector<Witness> witnesses;
  std::size_t verified_count = 0;
  std::string notes;
};

struct DominationNames {
  std::string universal;
  std::string existential;
  std::string index;
};

/// For each universal grade u <= U, searches the smallest existential grade
/// e <= E for which sup_i num[u][i] / den[e][i] looks finite. C is the
/// computed maximum, not a searched parameter.
inline Domination dominate(const Table& num, const Table& den, const DominationNames& names) {
  Domination out;
  const std::size_t n = num.front().size();
  const unsigned U = static_cast<unsigned>(num.size() - 1);
  const unsigned E = static_cast<unsigned>(den.size() - 1);
  std::vector<std::optional<LogTower>> ratios(n);
  auto witness = [&](unsigned u, unsigned e, std::size_t i) {
    return Witness{{{names.universal, u}, {names.existential, e}, {names.index, static_cast<std::int64_t>(i + 1)}},
                   num[u][i],
                   den[e][i]};
  };
  std::vector<Witness> verified_witnesses;
  std::optional<unsigned> inconclusive_at;
  out.found.resize(U + 1);
  for (unsigned u = 0; u <= U; ++u) {
    std::vector<RatioProfile> profiles;
    for (unsigned e = 0; e <= E; ++e) {
      for (std::size_t i = 0; i < n; ++i) ratios[i] = safe_ratio(num[u][i], den[e][i]);
      RatioProfile prof = profile_ratios(ratios);
      if (prof.finite && prof.stable) {
        out.found[u] = std::make_pair(e, prof.max);
        verified_witnesses.push_back(witness(u, e, prof.argmax));
        ++out.verified_count;
        break;
      }
      profiles.push_back(prof);
    }
    if (out.found[u]) continue;
    const bool all_growing =
        std::all_of(profiles.begin(), profiles.end(), [](const RatioProfile& p) { return p.growing; });
    if (all_growing) {
      if (!out.refuted_at) {
        out.refuted_at = u;
        for (unsigned e = 0; e <= E; ++e) {
          for (std::size_t i : tail_samples(n)) out.witnesses.push_back(witness(u, e, i));
        }
      }
    } else if (!inconclusive_at) {
      inconclusive_at = u;
    }
  }
  if (out.refuted_at) {
    out.status = Status::candidate_refutation;
    out.notes = names.universal + "=" + std::to_string(*out.refuted_at) + ": ratio grows for every " +
                names.existential + " <= " + std::to_string(E);
  } else if (inconclusive_at) {
    out.status = Status::inconclusive;
    out.witnesses = std::move(verified_witnesses);
    out.notes = names.universal + "=" + std::to_string(*inconclusive_at) +
                ": no stable constant and no monotone growth within bounds";
  } else {
    out.status = Status::verified_to_depth;
    out.witnesses = std::move(verified_witnesses);
  }
  return out;
}

inline void record_found(Certificate& cert, const Domination& d, const std::string& universal,
                         const std::string& existential) {
  for (std::size_t u = 0; u < d.found.size(); ++u) {
    if (!d.found[u]) continue;
    const std::string key = universal + std::to_string(u) + ".";
    cert.constants[key + existential] = LogTower::from_real(d.found[u]->first);
    cert.constants[key + "C"] = d.found[u]->second;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------

enum class TailStrategy { automatic, integral, geometric };

struct NuclearityOptions {
  TailStrategy tail = TailStrategy::automatic;
  /// Largest admissible ratio of consecutive terms for the geometric tail.
  long double rho_max = 0.9L;
};

/// Partial sum of a_{j,q}/a_{j,r} over j <= depth, certified by a tail bound.
inline Certificate gp_nuclearity_check(const KoetheMatrix& A, unsigned q, unsigned r, std::size_t depth,
                                       NuclearityOptions opt = {}) {
  if (q > r) throw std::domain_error("gp_nuclearity_check: requires q <= r");
  if (depth < 16) throw std::domain_error("gp_nuclearity_check: depth must be at least 16");

  Certificate cert;
  cert.condition = "grothendieck_pietsch";
  cert.bounds = {{"q", q}, {"r", r}, {"depth", static_cast<std::int64_t>(depth)}};

  const std::size_t quarter = depth / 4;
  std::vector<LogTower> tail_terms;
  tail_terms.reserve(quarter);
  LogTower sum;
  for (std::size_t j = 1; j <= depth; ++j) {
    const LogTower num = A.entry(j, q);
    const LogTower den = A.entry(j, r);
    LogTower term;
    if (den.is_zero()) {
      if (!num.is_zero()) {
        cert.status = Status::inconclusive;
        cert.notes = "a_{j,r} vanishes where a_{j,q} does not at j=" + std::to_string(j);
        return cert;
      }
    } else {
      term = lt_div(num, den);
    }
    sum = lt_add(sum, term);
    if (j > depth - quarter) tail_terms.push_back(term);
  }
  cert.constants["partial_sum"] = sum;
  cert.witnesses.push_back(
      {{{"j", static_cast<std::int64_t>(depth)}}, A.entry(depth, q), A.entry(depth, r)});

  auto try_integral = [&]() -> std::optional<LogTower> {
    const auto& law = A.power_law();
    const long double d = static_cast<long double>(r) - q;
    if (!law || d <= 1) return std::nullopt;
    // sum_{j>J} (s j)^{-d} <= s^{-d} J^{1-d} / (d - 1)
    const long double s = law->scale;
    const LogTower bound = lt_div(
        lt_mul(lt_pow(LogTower::from_real(s), -d), lt_pow(LogTower::from_real(depth), 1 - d)),
        LogTower::from_real(d - 1));
    return bound;
  };
  auto try_geometric = [&]() -> std::optional<std::pair<LogTower, long double>> {
    long double rho = 0;
    for (std::size_t i = 1; i < tail_terms.size(); ++i) {
      if (tail_terms[i - 1].is_zero()) {
        if (!tail_terms[i].is_zero()) return std::nullopt;
        continue;
      }
      rho = std::max(rho, lt_div(tail_terms[i], tail_terms[i - 1]).to_real());
    }
    if (!(rho <= opt.rho_max)) return std::nullopt;
    const LogTower last = tail_terms.back();
    return std::make_pair(lt_mul(last, LogTower::from_real(rho / (1 - rho))), rho);
  };

  std::optional<LogTower> bound;
  if (opt.tail != TailStrategy::geometric) {
    bound = try_integral();
    if (bound) cert.notes = "integral comparison tail";
  }
  if (!bound && opt.tail != TailStrategy::integral) {
    if (auto g = try_geometric()) {
      bound = g->first;
      cert.constants["rho"] = LogTower::from_real(g->second);
      cert.notes = "geometric ratio tail";
    }
  }
  if (bound) {
    cert.status = Status::verified_to_depth;
    cert.constants["tail_bound"] = *bound;
  } else {
    cert.status = Status::inconclusive;
    cert.notes = "no tail strategy certifies convergence";
  }
  return cert;
}

// ---------------------------------------------------------------------------

struct EquivalenceBounds {
  unsigned Q = 6;
  unsigned R = 6;
  std::size_t J = 10000;
};

using IndexMap = std::function<std::size_t(std::size_t)>;

inline IndexMap identity_map() {
  return [](std::size_t j) { return j; };
}

/// Throws unless sigma permutes [1, J].
inline void require_bijection(const IndexMap& sigma, std::size_t J) {
  std::vector<bool> seen(J + 1, false);
  for (std::size_t j = 1; j <= J; ++j) {
    const std::size_t s = sigma(j);
    if (s < 1 || s > J || seen[s]) {
      throw std::domain_error("sigma is not a bijection of [1, " + std::to_string(J) + "] (fails at j=" +
                              std::to_string(j) + ")");
    }
    seen[s] = true;
  }
}

/// (alpha): for all q <= Q some r <= R has a_{sigma(j),q} <= C b_{j,r};
/// (beta):  for all r' <= Q some q' <= R has b_{j,r'} <= C' a_{sigma(j),q'}.
inline std::pair<Certificate, Certificate> equivalence_check(const GradedRule& a, const GradedRule& b,
                                                             const IndexMap& sigma, EquivalenceBounds bounds) {
  if (bounds.J < 4) throw std::domain_error("equivalence_check: J must be at least 4");
  require_bijection(sigma, bounds.J);
  const unsigned G = std::max(bounds.Q, bounds.R);
  const auto at = detail::fill_table(bounds.J, G, [&](std::size_t j, unsigned g) { return a(sigma(j), g); });
  const auto bt = detail::fill_table(bounds.J, G, [&](std::size_t j, unsigned g) { return b(j, g); });
  auto slice = [](const detail::Table& t, unsigned top) {
    return detail::Table(t.begin(), t.begin() + top + 1);
  };

  auto make = [&](const std::string& name, const detail::Domination& d, const std::string& u,
                  const std::string& e) {
    Certificate c;
    c.condition = name;
    c.bounds = {{"Q", bounds.Q}, {"R", bounds.R}, {"J", static_cast<std::int64_t>(bounds.J)}};
    c.status = d.status;
    c.witnesses = d.witnesses;
    c.notes = d.notes;
    detail::record_found(c, d, u, e);
    return c;
  };
  const auto alpha = detail::dominate(slice(at, bounds.Q), slice(bt, bounds.R), {"q", "r", "j"});
  const auto beta = detail::dominate(slice(bt, bounds.Q), slice(at, bounds.R), {"r", "q", "j"});
  return {make("alpha", alpha, "q", "r"), make("beta", beta, "r", "q")};
}

inline std::pair<Certificate, Certificate> equivalence_check(const KoetheMatrix& A, const KoetheMatrix& B,
                                                             const IndexMap& sigma, EquivalenceBounds bounds) {
  return equivalence_check(
      [&](std::size_t j, unsigned q) { return A.entry(j, q); },
      [&](std::size_t j, unsigned q) { return B.entry(j, q); }, sigma, bounds);
}

// ---------------------------------------------------------------------------

struct DnResult {
  LogTower lhs;
  LogTower rhs;
  bool ok = false;
};

/// |x|_p^2 <= |x|_{l2} |x|_{2p}.
inline DnResult dn_check(const SeqVector& x, unsigned p) {
  DnResult r;
  const LogTower np = s_norm(x, p);
  r.lhs = lt_mul(np, np);
  r.rhs = lt_mul(s_norm(x, 0), s_norm(x, 2 * p));
  r.ok = r.lhs <= lt_mul(r.rhs, LogTower::from_real(1.0L + 1e-12L));
  return r;
}

/// q = 2^j p with j the least integer such that r <= 2^j.
inline unsigned dn_exponent(unsigned p, unsigned r) {
  if (r < 1) throw std::domain_error("dn_exponent: r must be positive");
  return (1u << std::bit_width(r - 1)) * p;
}

// ---------------------------------------------------------------------------

struct ConditionIvBounds {
  unsigned P = 6;
  unsigned Q = 6;
  unsigned R = 6;
  std::size_t K = 10000;
};

/// exists p <= P, for all q <= Q, exists r <= R: rows(k,q) <= C rows(k,p)^r, k <= K.
inline Certificate condition_iv_check(const GradedRule& rows, ConditionIvBounds bounds) {
  if (bounds.K < 4) throw std::domain_error("condition_iv_check: K must be at least 4");
  const unsigned G = std::max(bounds.P, bounds.Q);
  const auto table = detail::fill_table(bounds.K, G, rows);
  for (std::size_t k = 0; k < bounds.K; ++k) {
    if (table[0][k].is_zero()) {
      throw std::domain_error("condition_iv_check: rows(k,0) must be positive (k=" + std::to_string(k + 1) + ")");
    }
  }
  const detail::Table num(table.begin(), table.begin() + bounds.Q + 1);

  Certificate cert;
  cert.condition = "condition_iv";
  cert.bounds = {{"P", bounds.P}, {"Q", bounds.Q}, {"R", bounds.R}, {"K", static_cast<std::int64_t>(bounds.K)}};

  std::optional<detail::Domination> best;
  unsigned best_p = 0;
  bool all_refuted = true;
  for (unsigned p = 0; p <= bounds.P; ++p) {
    detail::Table den(bounds.R + 1, std::vector<LogTower>(bounds.K));
    parallel_for(bounds.K, [&](std::size_t k) {
      for (unsigned r = 0; r <= bounds.R; ++r) den[r][k] = r == 0 ? LogTower::one() : lt_pow(table[p][k], r);
    }, 64);
    auto d = detail::dominate(num, den, {"q", "r", "k"});
    if (d.status == Status::verified_to_depth) {
      cert.status = Status::verified_to_depth;
      cert.constants["p"] = LogTower::from_real(p);
      detail::record_found(cert, d, "q", "r");
      for (auto& w : d.witnesses) w.params["p"] = p;
      cert.witnesses = std::move(d.witnesses);
      return cert;
    }
    all_refuted = all_refuted && d.status == Status::candidate_refutation;
    if (!best || d.verified_count > best->verified_count) {
      best = std::move(d);
      best_p = p;
    }
  }
  cert.status = all_refuted ? Status::candidate_refutation : Status::inconclusive;
  cert.constants["p"] = LogTower::from_real(best_p);
  if (best->refuted_at) cert.constants["q"] = LogTower::from_real(*best->refuted_at);
  detail::record_found(cert, *best, "q", "r");
  for (auto& w : best->witnesses) w.params["p"] = best_p;
  cert.witnesses = std::move(best->witnesses);
  cert.notes = "best p=" + std::to_string(best_p) + "; " + best->notes;
  return cert;
}

}  // namespace klab

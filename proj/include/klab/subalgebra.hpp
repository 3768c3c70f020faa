#pragma once

// Closed *-subalgebras of Köthe algebras: the index partition induced by a
// generator family, the level sets of one element, the normal form and the
// projection onto the subalgebra.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klab/checks.hpp"
#include "klab/koethe.hpp"
#include "klab/seqvector.hpp"

namespace klab {

using IndexSet = std::vector<std::size_t>;

/// N_0 together with the classes N_1, N_2, ... (ordered by minimum) of [1, n].
struct Partition {
  std::size_t n = 0;
  IndexSet n0;
  std::vector<IndexSet> classes;

  friend bool operator==(const Partition&, const Partition&) = default;

  /// Throws unless the classes and n0 tile [1, n] with the ordering rules.
  void validate() const {
    std::vector<int> owner(n + 1, -1);
    auto claim = [&](std::size_t j, int who) {
      if (j < 1 || j > n) throw std::domain_error("Partition: index " + std::to_string(j) + " outside [1, n]");
      if (owner[j] != -1) throw std::domain_error("Partition: index " + std::to_string(j) + " assigned twice");
      owner[j] = who;
    };
    for (std::size_t j : n0) claim(j, 0);
    for (std::size_t k = 0; k < classes.size(); ++k) {
      if (classes[k].empty()) throw std::domain_error("Partition: empty class");
      if (!std::is_sorted(classes[k].begin(), classes[k].end())) {
        throw std::domain_error("Partition: class entries must be sorted");
      }
      if (k > 0 && classes[k].front() < classes[k - 1].front()) {
        throw std::domain_error("Partition: classes must be ordered by their minima");
      }
      for (std::size_t j : classes[k]) claim(j, static_cast<int>(k) + 1);
    }
    for (std::size_t j = 1; j <= n; ++j) {
      if (owner[j] == -1) throw std::domain_error("Partition: index " + std::to_string(j) + " uncovered");
    }
  }

  /// Class position (0-based) of index j, or nullopt for N_0.
  std::optional<std::size_t> class_of(std::size_t j) const {
    for (std::size_t k = 0; k < classes.size(); ++k) {
      if (std::binary_search(classes[k].begin(), classes[k].end(), j)) return k;
    }
    return std::nullopt;
  }
};

struct PartitionOptions {
  /// When set, i ~ j iff every generator differs by at most this much at i
  /// and j, closed transitively. Off by default: the relation is exact.
  std::optional<double> tolerance;
};

/// N_0 is the common zero set of the generators; i ~ j iff every generator
/// takes the same value at i and j.
inline Partition partition_from_generators(std::span<const SeqVector> gens, std::size_t n,
                                           PartitionOptions opt = {}) {
  if (gens.empty()) throw std::domain_error("partition_from_generators: empty generator list");
  if (n < 1) throw std::domain_error("partition_from_generators: n must be positive");
  for (const auto& g : gens) {
    if (g.max_index() > n) throw std::domain_error("partition_from_generators: generator support exceeds n");
  }
  std::vector<std::vector<Complex>> sig(n + 1, std::vector<Complex>(gens.size()));
  for (std::size_t g = 0; g < gens.size(); ++g) {
    auto idx = gens[g].support();
    auto val = gens[g].values();
    for (std::size_t i = 0; i < idx.size(); ++i) sig[idx[i]][g] = val[i];
  }
  auto is_zero = [&](std::size_t j) {
    return std::all_of(sig[j].begin(), sig[j].end(), [](Complex c) { return c == Complex{}; });
  };

  Partition out;
  out.n = n;
  if (!opt.tolerance) {
    auto less = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](Complex x, Complex y) {
        return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
      });
    };
    std::map<std::vector<Complex>, std::size_t, decltype(less)> slot(less);
    for (std::size_t j = 1; j <= n; ++j) {
      if (is_zero(j)) {
        out.n0.push_back(j);
        continue;
      }
      auto [it, fresh] = slot.try_emplace(sig[j], out.classes.size());
      if (fresh) out.classes.emplace_back();
      out.classes[it->second].push_back(j);
    }
    return out;
  }

  const double tol = *opt.tolerance;
  if (!(tol >= 0)) throw std::domain_error("partition_from_generators: tolerance must be non-negative");
  std::vector<std::size_t> parent(n + 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto near = [&](std::size_t i, std::size_t j) {
    for (std::size_t g = 0; g < gens.size(); ++g) {
      if (std::abs(sig[i][g] - sig[j][g]) > tol) return false;
    }
    return true;
  };
  std::vector<std::size_t> live;
  for (std::size_t j = 1; j <= n; ++j) {
    const bool zero = std::all_of(sig[j].begin(), sig[j].end(), [tol](Complex c) { return std::abs(c) <= tol; });
    if (zero) {
      out.n0.push_back(j);
    } else {
      live.push_back(j);
    }
  }
  for (std::size_t a = 0; a < live.size(); ++a) {
    for (std::size_t b = a + 1; b < live.size(); ++b) {
      if (near(live[a], live[b])) {
        const std::size_t ra = find(live[a]), rb = find(live[b]);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t j : live) {
    auto [it, fresh] = slot.try_emplace(find(j), out.classes.size());
    if (fresh) out.classes.emplace_back();
    out.classes[it->second].push_back(j);
  }
  return out;
}

/// M_1, M_2, ...: positions (1-based) grouped by |eta|, strictly decreasing,
/// stopping at zero.
inline std::vector<IndexSet> level_sets(std::span<const Complex> eta) {
  std::vector<std::pair<double, std::size_t>> mods;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double m = std::abs(eta[i]);
    if (m > 0) mods.emplace_back(m, i + 1);
  }
  std::stable_sort(mods.begin(), mods.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<IndexSet> out;
  for (std::size_t i = 0; i < mods.size(); ++i) {
    if (i == 0 || mods[i].first != mods[i - 1].first) out.emplace_back();
    out.back().push_back(mods[i].second);
  }
  for (auto& s : out) std::sort(s.begin(), s.end());
  return out;
}

/// Sup-distance |x_n - e_{M_1}|_{inf,q} of the powers x_n = (xi conj(xi) / |eta_{m_1}|^2)^n
/// for n = 1..steps, computed on the power matrix.
inline std::vector<LogTower> level_set_limit(const SeqVector& xi, unsigned q, unsigned steps) {
  if (xi.empty()) throw std::domain_error("level_set_limit: xi must be nonzero");
  std::vector<Complex> dense = xi.to_dense(xi.max_index());
  const auto levels = level_sets(dense);
  const double top = std::abs(dense[levels.front().front() - 1]);
  std::vector<LogTower> out;
  out.reserve(steps);
  for (unsigned n = 1; n <= steps; ++n) {
    LogTower dist;
    for (std::size_t l = 1; l < levels.size(); ++l) {
      const double ratio = std::abs(dense[levels[l].front() - 1]) / top;
      const LogTower coef = lt_pow(LogTower::from_real(ratio), 2.0L * n);
      for (std::size_t j : levels[l]) dist = lt_max(dist, lt_mul(coef, power_matrix().entry(j, q)));
    }
    out.push_back(dist);
  }
  return out;
}

struct NormalForm {
  /// rows(k, q) = max_{j in N_k} a_{j,q}, k in class order.
  GradedRule rows;
  std::size_t size = 0;
  /// For the power matrix: sigma(k) (1-based) lists the classes by increasing
  /// maximum, and n_k = max N_{sigma(k)}.
  std::optional<std::vector<std::size_t>> sigma;
  std::optional<std::vector<std::size_t>> n;
};

inline bool is_canonical_power(const KoetheMatrix& A) {
  return A.power_law() && A.power_law()->scale == 1.0;
}

inline NormalForm normal_form(const Partition& part, const KoetheMatrix& A) {
  part.validate();
  NormalForm out;
  out.size = part.classes.size();
  auto classes = std::make_shared<const std::vector<IndexSet>>(part.classes);
  out.rows = [classes, A](std::size_t k, unsigned q) {
    if (k == 0 || k > classes->size()) throw std::out_of_range("normal_form: class index out of range");
    LogTower best;
    for (std::size_t j : (*classes)[k - 1]) best = lt_max(best, A.entry(j, q));
    return best;
  };
  if (is_canonical_power(A)) {
    std::vector<std::size_t> order(part.classes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return part.classes[a].back() < part.classes[b].back(); });
    std::vector<std::size_t> sigma, n;
    for (std::size_t k = 0; k < order.size(); ++k) {
      sigma.push_back(order[k] + 1);
      n.push_back(part.classes[order[k]].back());
      if (k > 0 && n[k] <= n[k - 1]) throw std::logic_error("normal_form: class maxima must be distinct");
    }
    out.sigma = std::move(sigma);
    out.n = std::move(n);
  }
  return out;
}

/// (pi x)_j = x_{n_k} for j in N_{sigma(k)}, zero on N_0.
inline SeqVector project_pi(const SeqVector& x, const Partition& part, std::span<const std::size_t> n,
                            std::span<const std::size_t> sigma) {
  if (n.size() != sigma.size() || sigma.size() != part.classes.size()) {
    throw std::domain_error("project_pi: n, sigma and the partition disagree in length");
  }
  std::vector<std::size_t> idx;
  std::vector<Complex> val;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (sigma[k] < 1 || sigma[k] > part.classes.size()) throw std::domain_error("project_pi: sigma out of range");
    const Complex v = x.at(n[k]);
    if (v == Complex{}) continue;
    for (std::size_t j : part.classes[sigma[k] - 1]) {
      idx.push_back(j);
      val.push_back(v);
    }
  }
  return SeqVector(std::move(idx), std::move(val));
}

struct IsoBounds {
  unsigned Q = 6;
  unsigned R = 6;
};

/// (alpha) rows(sigma(k), q) <= C n_k^r and (beta) n_k^{r'} <= C' rows(sigma(k), q').
inline std::pair<Certificate, Certificate> iso_check(const GradedRule& rows, std::span<const std::size_t> n,
                                                     std::span<const std::size_t> sigma, IsoBounds bounds) {
  for (std::size_t k = 1; k < n.size(); ++k) {
    if (n[k] <= n[k - 1]) throw std::domain_error("iso_check: n must be strictly increasing (fails at k=" +
                                                  std::to_string(k + 1) + ")");
  }
  if (sigma.size() != n.size()) throw std::domain_error("iso_check: sigma and n differ in length");
  auto nk = std::make_shared<const std::vector<std::size_t>>(n.begin(), n.end());
  auto sg = std::make_shared<const std::vector<std::size_t>>(sigma.begin(), sigma.end());
  GradedRule target = [nk](std::size_t k, unsigned q) {
    return lt_pow(LogTower::from_real(static_cast<long double>((*nk)[k - 1])), q);
  };
  IndexMap map = [sg](std::size_t k) { return (*sg)[k - 1]; };
  return equivalence_check(rows, target, map, {bounds.Q, bounds.R, n.size()});
}

}  // namespace klab

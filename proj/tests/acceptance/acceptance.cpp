// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "klab/klab.hpp"

using namespace klab;

namespace {

// Pinned tolerances and budgets.
constexpr long double kLogRelTol = 1e-9L;          // criteria 1 and 4
constexpr long double kHadamardAgreement = 1e-9L;  // criterion 3
constexpr long double kDnSlack = 1e-12L;           // criterion 5
constexpr double kRankOneTol = 1e-6;               // criterion 6, random f
constexpr double kRankOneExactTol = 1e-12;         // criterion 6, f = (e1+e2)/sqrt2
constexpr double kSubmultSlack = 1e-9;             // criterion 7
constexpr double kZetaTol = 1e-3;                  // criterion 9

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.pass && budget_s > 0 && secs > budget_s) {
    out.pass = false;
    out.detail = "runtime " + std::to_string(secs) + " s exceeds " + std::to_string(budget_s) + " s";
  }
  if (!out.pass) ++failures;
  std::printf("%s criterion %d: %s (%.3f s)%s%s\n", out.pass ? "PASS" : "FAIL", id, title, secs,
              out.detail.empty() ? "" : " -- ", out.detail.c_str());
  std::fflush(stdout);
}

long double signed_log(const LogTower& x) {
  const SignedTower l = lt_log(x);
  return l.negative ? -l.magnitude.to_real() : l.magnitude.to_real();
}


// --- 1 ----------------------------------------------------------------------

Outcome alpha_products() {
  Outcome o;
  Rng rng(20240101);
  constexpr std::size_t J = 200;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> alpha(J);
    double x = rng.uniform(0.1, 3.0);
    for (auto& a : alpha) a = x *= 1.0 + rng.uniform(1e-3, 0.5);
    for (std::size_t p = 1; p <= 20; ++p) {
      const auto r = alphas_sup(alpha, p, J);
      long double lp = 0;
      for (std::size_t i = 0; i < p; ++i) lp += std::log(static_cast<long double>(alpha[i]));
      const long double rel = std::fabs(signed_log(r.value) - lp) / std::max(1.0L, std::fabs(lp));
      o.require(rel <= kLogRelTol,
                "case " + std::to_string(t) + " p=" + std::to_string(p) + ": log-relative error " + std::to_string(static_cast<double>(rel)));
      o.require(r.argmax == p, "case " + std::to_string(t) + " p=" + std::to_string(p) + ": argmax " + std::to_string(r.argmax));
    }
  }
  return o;
}

// --- 2 ----------------------------------------------------------------------

using Quad = boost::multiprecision::cpp_bin_float_quad;

bool bounds_oracle(const std::vector<double>& a, const std::vector<std::uint64_t>& b, std::uint64_t C) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Quad ak = a[k];
    const Quad bk = static_cast<Quad>(b[k]);
    if (ak > Quad(C) * bk) return false;
    if (bk > Quad(C) * ak * ak) return false;
    if (k > 0 && b[k] <= b[k - 1]) return false;
  }
  return true;
}

Outcome bk_construction() {
  Outcome o;
  const std::vector<double> worked{2, 4, 6, 8, 10, 12, 14, 16};
  const auto w = build_bk(worked, 0);
  o.require(w.C == 1 && std::vector<std::uint64_t>(w.b.begin(), w.b.begin() + 4) ==
                            std::vector<std::uint64_t>{3, 5, 17, 37},
            "worked case a=(2,4,6,8,...) gives a different prefix");
  o.require(bounds_oracle(worked, w.b, w.C), "worked case violates the bounds");

  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.index(1, 500));
    std::vector<double> a(n);
    double prev = 2;
    for (std::size_t k = 1; k <= n; ++k) {
      double v = std::max(prev, 2.0 * static_cast<double>(k));
      if (rng.uniform() < 0.1) v += rng.uniform(0, 40);
      a[k - 1] = prev = v;
    }
    const auto r = build_bk(a, 0);
    o.require(r.b.size() == n && bounds_oracle(a, r.b, r.C), "random case " + std::to_string(t) + " fails the oracle");
  }
  return o;
}

// --- 3 ----------------------------------------------------------------------

Outcome hadamard() {
  Outcome o;
  const std::size_t K = 2 + 4 + 8 + 16 + 32 + 64 + 128 + 256;
  const unsigned Q = 8;
  const auto d = linear_schedule(K);
  HadamardReportOptions opt;
  opt.agreement = kHadamardAgreement;
  const auto cert = hadamard_condition_report(d, K, Q, opt);
  o.require(cert.verified(), "certificate " + std::string(to_string(cert.status)) + ": " + cert.notes);
  o.require(cert.grade("p") == 1 && cert.grade("C") == 1, "constants differ from p = C = 1");
  // independent enumeration in plain doubles
  const auto sys = hadamard_system(d, K);
  for (std::size_t k = 1; k <= K; ++k) {
    const auto idx = sys[k - 1].support();
    const double amp = std::abs(sys[k - 1].values()[0]);
    const double jmax = static_cast<double>(idx.back());
    for (unsigned q = 0; q <= Q; ++q) {
      const double ratio = amp * std::pow(jmax, q) / std::pow(amp * jmax, 2.0 * q);
      const double closed = static_cast<double>(hadamard_ratio_closed(d, k, q).to_real());
      o.require(ratio <= 1.0 + 1e-12, "ratio exceeds 1 at k=" + std::to_string(k));
      o.require(std::fabs(ratio - closed) <= kHadamardAgreement * std::max(1.0, closed),
                "closed form differs at k=" + std::to_string(k) + ", q=" + std::to_string(q));
    }
  }
  return o;
}

// --- 4 ----------------------------------------------------------------------

Outcome tower_divergence() {
  Outcome o;
  const auto sys = tower_system(8, 8);
  for (std::size_t p = 1; p <= 4; ++p) {
    for (std::size_t r = 1; r <= 4; ++r) {
      LogTower prev;
      for (std::size_t k = 1; k <= 8; ++k) {
        const auto R = evaluate(sys, k, divergence_monomial(p, r));
        o.require(k == 1 || R > prev, "R(k," + std::to_string(p) + "," + std::to_string(r) + ") not increasing at k=" + std::to_string(k));
        prev = R;
      }
    }
  }
  o.require(evaluate(sys, 4, divergence_monomial(1, 2)) > LogTower::from_real(1e3), "R(4,1,2) <= 10^3");
  for (std::size_t k = 1; k <= 8; ++k) {
    for (std::size_t p = 1; p <= 5; ++p) {
      const auto e = tower_supnorm_enumerated(sys, k, p);
      o.require(top_level_relative_gap(tower_supnorm(sys, k, p), e.value) <= kLogRelTol && e.argmax == p,
                "closed form vs enumeration at k=" + std::to_string(k) + ", p=" + std::to_string(p));
    }
  }
  const auto cert = divergence_report(sys, 4, 4);
  o.require(cert.refuted(), "certificate " + std::string(to_string(cert.status)) + ": " + cert.notes);
  return o;
}

// --- 5 ----------------------------------------------------------------------

Outcome dn_inequality() {
  Outcome o;
  Rng rng(5150);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_truncated_vector(rng, 128, 24);
    for (unsigned p = 0; p <= 4; ++p) {
      const auto r = dn_check(x, p);
      o.require(r.lhs <= lt_mul(r.rhs, LogTower::from_real(1 + kDnSlack)),
                "sample " + std::to_string(t) + " p=" + std::to_string(p));
    }
  }
  for (std::size_t k = 1; k <= 128; ++k) {
    for (unsigned p = 0; p <= 4; ++p) {
      const auto r = dn_check(SeqVector::unit(k), p);
      o.require(lt_close(r.lhs, r.rhs, kDnSlack), "no equality on e_" + std::to_string(k));
    }
  }
  return o;
}

// --- 6 ----------------------------------------------------------------------

Outcome rank_one() {
  Outcome o;
  Rng rng(606);
  constexpr std::size_t N = 256;
  for (int t = 0; t < 50; ++t) {
    const auto f = random_decaying_vector(rng, N, rng.uniform(0.05, 0.5));
    const auto m = SmoothMatrix::rank_one(f, N);
    for (unsigned q = 0; q <= 4; ++q) {
      const double sq = static_cast<double>(s_norm(f, q).to_real());
      const double norm = op_norm_q(m, q);
      o.require(std::fabs(norm - sq * sq) <= kRankOneTol * sq * sq,
                "f #" + std::to_string(t) + " q=" + std::to_string(q));
    }
  }
  const SeqVector f({1, 2}, {std::sqrt(0.5), std::sqrt(0.5)});
  for (unsigned q = 0; q <= 4; ++q) {
    const double expect = (1 + std::pow(4.0, q)) / 2;
    o.require(std::fabs(op_norm_q(SmoothMatrix::rank_one(f, 2), q) - expect) <= kRankOneExactTol * expect,
              "(e1+e2)/sqrt2 at q=" + std::to_string(q));
  }
  return o;
}

// --- 7 ----------------------------------------------------------------------

Outcome submultiplicative() {
  Outcome o;
  Rng rng(707);
  constexpr std::size_t N = 64;
  auto draw = [&] {
    const double decay = rng.uniform(0.05, 0.5);
    SmoothMatrix::Dense d(N, N);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) d(i, j) = rng.complex_normal() * std::exp(-decay * static_cast<double>(i + j + 2));
    }
    return SmoothMatrix(d);
  };
  for (int t = 0; t < 100; ++t) {
    const auto x = draw();
    const auto y = draw();
    const auto xy = mat_mul(x, y);
    for (unsigned q = 0; q <= 3; ++q) {
      o.require(op_norm_q(xy, q) <= (1 + kSubmultSlack) * op_norm_q(x, q) * op_norm_q(y, q),
                "pair " + std::to_string(t) + " q=" + std::to_string(q));
    }
  }
  return o;
}

// --- 8 ----------------------------------------------------------------------

Partition brute_force_partition(const std::vector<SeqVector>& gens, std::size_t n) {
  Partition p;
  p.n = n;
  std::vector<bool> placed(n + 1, false);
  for (std::size_t i = 1; i <= n; ++i) {
    if (placed[i]) continue;
    bool zero = true;
    for (const auto& g : gens) zero = zero && g.at(i) == Complex{};
    if (zero) {
      p.n0.push_back(i);
      placed[i] = true;
      continue;
    }
    IndexSet cls;
    for (std::size_t j = i; j <= n; ++j) {
      bool same = true;
      for (const auto& g : gens) same = same && g.at(i) == g.at(j);
      if (same && !placed[j]) {
        cls.push_back(j);
        placed[j] = true;
      }
    }
    p.classes.push_back(cls);
  }
  return p;
}

Outcome partition_oracle() {
  Outcome o;
  Rng rng(808);
  const Complex palette[] = {0.0, 1.0, 2.0, Complex(0, 1), -1.0};
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.index(1, 12));
    const std::size_t count = static_cast<std::size_t>(rng.index(1, 4));
    std::vector<SeqVector> gens;
    for (std::size_t g = 0; g < count; ++g) {
      std::vector<Complex> v(n);
      for (auto& x : v) x = palette[rng.index(0, 4)];
      gens.push_back(SeqVector::from_dense(v));
    }
    const auto got = partition_from_generators(gens, n);
    o.require(got == brute_force_partition(gens, n), "set " + std::to_string(t) + " differs from the oracle");
    const auto nf = normal_form(got, power_matrix());
    for (int s = 0; s < 5; ++s) {
      const auto x = random_decaying_vector(rng, n, 0.1);
      const auto px = project_pi(x, got, *nf.n, *nf.sigma);
      o.require(project_pi(px, got, *nf.n, *nf.sigma) == px, "pi not idempotent on set " + std::to_string(t));
      for (unsigned q = 0; q <= 4; ++q) {
        o.require(sup_norm(px, q) <= sup_norm(x, q), "pi not contractive on set " + std::to_string(t));
      }
    }
  }
  return o;
}

// --- 9 ----------------------------------------------------------------------

Outcome grothendieck_pietsch() {
  Outcome o;
  const auto conv = gp_nuclearity_check(power_matrix(), 0, 2, 1000000, {TailStrategy::integral, 0.9L});
  o.require(conv.verified(), "(0,2) not verified: " + conv.notes);
  if (conv.verified()) {
    const double s = static_cast<double>(conv.constants.at("partial_sum").to_real());
    o.require(std::fabs(s - std::numbers::pi * std::numbers::pi / 6) <= kZetaTol, "partial sum " + std::to_string(s));
  }
  const auto div = gp_nuclearity_check(power_matrix(), 0, 1, 1000000);
  o.require(div.status == Status::inconclusive, "(0,1) gives " + std::string(to_string(div.status)));
  return o;
}

// --- 10 ---------------------------------------------------------------------

std::string certificate_bundle() {
  Json all = Json::array();
  const auto d = linear_schedule(510);
  all.push_back(to_json(hadamard_condition_report(d, 510, 8)));
  all.push_back(to_json(divergence_report(tower_system(8, 8), 4, 4)));
  all.push_back(to_json(gp_nuclearity_check(power_matrix(), 0, 2, 100000)));
  const auto rows = subalgebra_rows(hadamard_system(d, 510), singleton_partition(510), 4, RowNorm::sup);
  all.push_back(to_json(condition_iv_check(rows.rule(), {2, 4, 8, 510})));
  const auto [a, b] = equivalence_check(power_matrix(), scaled_power_matrix(3), identity_map(), {4, 4, 5000});
  all.push_back(to_json(a));
  all.push_back(to_json(b));
  Rng rng(99);
  Certificate dn;
  dn.condition = "dn";
  for (int i = 0; i < 50; ++i) {
    const auto r = dn_check(random_truncated_vector(rng, 64, 8), 2);
    dn.witnesses.push_back({{{"i", i}}, r.lhs, r.rhs});
  }
  all.push_back(to_json(dn));
  return all.dump();
}

Outcome determinism() {
  Outcome o;
  const std::string first = certificate_bundle();
  const std::string second = certificate_bundle();
  o.require(first == second, "two runs differ");
  // thread count must not change the bytes either
  setenv("KOETHE_LAB_THREADS", "1", 1);
  const std::string serial = certificate_bundle();
  unsetenv("KOETHE_LAB_THREADS");
  o.require(first == serial, "single-threaded run differs");
  return o;
}

}  // namespace

int main() {
  run(1, "alpha-product supremum equals the product, argmax p", 1.0, alpha_products);
  run(2, "(a_k) -> (b_k) construction satisfies both bounds", 1.0, bk_construction);
  run(3, "Hadamard rows satisfy condition (iv) with p = C = 1, r = 2q", 10.0, hadamard);
  run(4, "prime tower ratios grow monotonically in k", 5.0, tower_divergence);
  run(5, "dominating-norm inequality with equality on unit vectors", 1.0, dn_inequality);
  run(6, "rank-one operator norm equals |f|_q^2", 30.0, rank_one);
  run(7, "operator norms are submultiplicative", 30.0, submultiplicative);
  run(8, "partition matches the brute-force oracle; pi idempotent and contractive", 1.0, partition_oracle);
  run(9, "Grothendieck-Pietsch sums at depth", 2.0, grothendieck_pietsch);
  run(10, "certificate runs are byte-identical", 0, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <map>

#include "klab/random.hpp"
#include "klab/subalgebra.hpp"

using namespace klab;

namespace {

SeqVector dense(std::initializer_list<double> xs) {
  std::vector<Complex> v(xs.begin(), xs.end());
  return SeqVector::from_dense(v);
}

}  // namespace

TEST(Partition, ExactRelation) {
  const std::vector<SeqVector> g{dense({1, 1, 2, 0, 2, 1}), dense({0, 0, 1, 0, 1, 3})};
  const auto p = partition_from_generators(g, 7);
  EXPECT_EQ(p.n0, (IndexSet{4, 7}));
  ASSERT_EQ(p.classes.size(), 3u);
  EXPECT_EQ(p.classes[0], (IndexSet{1, 2}));
  EXPECT_EQ(p.classes[1], (IndexSet{3, 5}));
  EXPECT_EQ(p.classes[2], (IndexSet{6}));
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.class_of(5), 1u);
  EXPECT_FALSE(p.class_of(4).has_value());
}

TEST(Partition, ComplexValuesAreCompared) {
  const std::vector<SeqVector> g{SeqVector::from_dense(std::vector<Complex>{Complex(1, 1), Complex(1, -1), Complex(1, 1)})};
  const auto p = partition_from_generators(g, 3);
  ASSERT_EQ(p.classes.size(), 2u);
  EXPECT_EQ(p.classes[0], (IndexSet{1, 3}));
}

TEST(Partition, ToleranceMergesNearValues) {
  const std::vector<SeqVector> g{dense({1.0, 1.0 + 1e-13, 2.0, 1e-14})};
  EXPECT_EQ(partition_from_generators(g, 4).classes.size(), 4u);
  const auto p = partition_from_generators(g, 4, {1e-12});
  EXPECT_EQ(p.n0, (IndexSet{4}));
  ASSERT_EQ(p.classes.size(), 2u);
  EXPECT_EQ(p.classes[0], (IndexSet{1, 2}));
}

TEST(Partition, Errors) {
  EXPECT_THROW(partition_from_generators({}, 3), std::domain_error);
  const std::vector<SeqVector> g{dense({1, 2, 3})};
  EXPECT_THROW(partition_from_generators(g, 2), std::domain_error);
  EXPECT_THROW(partition_from_generators(g, 0), std::domain_error);
  EXPECT_THROW(partition_from_generators(g, 3, {-1.0}), std::domain_error);
  Partition bad{3, {1}, {{2}, {2, 3}}};
  EXPECT_THROW(bad.validate(), std::domain_error);
  Partition unordered{3, {}, {{2}, {1, 3}}};
  EXPECT_THROW(unordered.validate(), std::domain_error);
  Partition gap{3, {}, {{1}, {3}}};
  EXPECT_THROW(gap.validate(), std::domain_error);
}

TEST(Partition, ClassesAreSubalgebraIdempotents) {
  // each indicator e_{N_k} is a polynomial in the generators: products of
  // class indicators vanish off the diagonal and reproduce on it
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    std::vector<SeqVector> g;
    for (int i = 0; i < 2; ++i) {
      std::vector<Complex> v(10);
      for (auto& x : v) x = static_cast<double>(rng.index(0, 2));
      g.push_back(SeqVector::from_dense(v));
    }
    if (std::all_of(g.begin(), g.end(), [](const SeqVector& x) { return x.empty(); })) continue;
    const auto p = partition_from_generators(g, 10);
    for (std::size_t a = 0; a < p.classes.size(); ++a) {
      const auto ea = SeqVector::indicator(p.classes[a]);
      EXPECT_EQ(hadamard_product(ea, ea), ea);
      for (std::size_t b = a + 1; b < p.classes.size(); ++b) {
        EXPECT_TRUE(hadamard_product(ea, SeqVector::indicator(p.classes[b])).empty());
      }
      for (const auto& gen : g) {
        // generators are constant on each class
        const Complex v = gen.at(p.classes[a].front());
        for (std::size_t j : p.classes[a]) EXPECT_EQ(gen.at(j), v);
      }
    }
  }
}

TEST(LevelSets, GroupByModulus) {
  const std::vector<Complex> eta{3.0, 1.0, Complex(0, 3), 0.5, -1.0, 0.0};
  const auto m = level_sets(eta);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0], (IndexSet{1, 3}));
  EXPECT_EQ(m[1], (IndexSet{2, 5}));
  EXPECT_EQ(m[2], (IndexSet{4}));
}

TEST(LevelSets, PowersConvergeToTheTopIndicator) {
  const auto d = level_set_limit(dense({3, 1, 3, 0.5, 1}), 0, 6);
  ASSERT_EQ(d.size(), 6u);
  for (std::size_t n = 0; n < d.size(); ++n) {
    // the second level has ratio 1/3: distance (1/9)^{n+1}
    EXPECT_NEAR(static_cast<double>(d[n].to_real()), std::pow(1.0 / 9.0, n + 1), 1e-15);
  }
  const auto w = level_set_limit(dense({3, 1, 3, 0.5, 1}), 2, 2);
  EXPECT_NEAR(static_cast<double>(w[0].to_real()), 25.0 / 9.0, 1e-12);
  EXPECT_THROW(level_set_limit(SeqVector{}, 0, 1), std::domain_error);
}

TEST(NormalForm, PowerMatrixOrdersByClassMaximum) {
  Partition p{6, {4}, {{1, 5}, {2, 3}, {6}}};
  const auto nf = normal_form(p, power_matrix());
  ASSERT_TRUE(nf.sigma && nf.n);
  EXPECT_EQ(*nf.sigma, (std::vector<std::size_t>{2, 1, 3}));
  EXPECT_EQ(*nf.n, (std::vector<std::size_t>{3, 5, 6}));
  EXPECT_EQ(static_cast<double>(nf.rows(1, 2).to_real()), 25.0);
  EXPECT_EQ(nf.size, 3u);
  EXPECT_FALSE(normal_form(p, scaled_power_matrix(2)).sigma.has_value());
  EXPECT_THROW(nf.rows(4, 0), std::out_of_range);
}

TEST(Projection, IdempotentAndContractive) {
  Partition p{6, {4}, {{1, 5}, {2, 3}, {6}}};
  const auto nf = normal_form(p, power_matrix());
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_decaying_vector(rng, 6, 0.3);
    const auto px = project_pi(x, p, *nf.n, *nf.sigma);
    EXPECT_EQ(project_pi(px, p, *nf.n, *nf.sigma), px);
    for (unsigned q = 0; q <= 3; ++q) EXPECT_LE(sup_norm(px, q), sup_norm(x, q));
    EXPECT_EQ(px.at(4), Complex{});
    EXPECT_EQ(px.at(1), x.at(5));
  }
  const std::vector<std::size_t> short_n{3};
  EXPECT_THROW(project_pi(SeqVector{}, p, short_n, *nf.sigma), std::domain_error);
}

TEST(IsoCheck, IdentityClassesAreIsomorphic) {
  std::vector<std::size_t> n(200), sigma(200);
  for (std::size_t k = 0; k < 200; ++k) {
    n[k] = k + 1;
    sigma[k] = k + 1;
  }
  GradedRule rows = [](std::size_t k, unsigned q) { return lt_pow(LogTower::from_real(2.0L * k), q); };
  const auto [alpha, beta] = iso_check(rows, n, sigma, {3, 3});
  EXPECT_TRUE(alpha.verified());
  EXPECT_TRUE(beta.verified());
  std::vector<std::size_t> bad = n;
  std::swap(bad[3], bad[4]);
  EXPECT_THROW(iso_check(rows, bad, sigma, {3, 3}), std::domain_error);
}

#include <gtest/gtest.h>

#include <cmath>

#include "klab/logtower.hpp"
#include "klab/random.hpp"

using namespace klab;

namespace {

long double ln_of(const LogTower& x) {
  const SignedTower l = lt_log(x);
  return l.negative ? -l.magnitude.to_real() : l.magnitude.to_real();
}

}  // namespace

TEST(LogTower, PlainValuesStayAtLevelZero) {
  const auto x = LogTower::from_real(12.5L);
  EXPECT_EQ(x.level(), 0);
  EXPECT_TRUE(x.is_plain());
  EXPECT_EQ(x.to_real(), 12.5L);
  EXPECT_TRUE(LogTower::from_real(0).is_zero());
  EXPECT_TRUE(LogTower{}.is_zero());
}

TEST(LogTower, LargeValuesClimbOneLevel) {
  const auto x = LogTower::from_real(1e20L);
  EXPECT_EQ(x.level(), 1);
  EXPECT_FALSE(x.reciprocal());
  EXPECT_NEAR(static_cast<double>(x.top()), 20 * std::log(10.0), 1e-12);
  EXPECT_TRUE(x.is_canonical());
}

TEST(LogTower, TinyValuesAreReciprocalTowers) {
  const auto x = LogTower::from_real(1e-20L);
  EXPECT_EQ(x.level(), 1);
  EXPECT_TRUE(x.reciprocal());
  EXPECT_NEAR(static_cast<double>(x.to_real() / 1e-20L), 1.0, 1e-12);
  EXPECT_LT(x, LogTower::from_real(1e-10L));
  EXPECT_GT(x, LogTower{});
}

TEST(LogTower, TwoToThe65536) {
  const auto x = lt_pow(LogTower::from_real(2), 65536);
  EXPECT_EQ(x.level(), 1);
  EXPECT_NEAR(static_cast<double>(x.top()), 65536 * std::log(2.0), 1e-9);
  const auto y = lt_pow(LogTower::from_real(2), 65537);
  EXPECT_LT(x, y);
  EXPECT_NEAR(static_cast<double>(ln_of(lt_div(y, x))), std::log(2.0), 1e-9);
}

TEST(LogTower, IteratedPowersReachHigherLevels) {
  // 2^(2^65536) has ln = 2^65536 ln 2, which is itself a level-1 tower.
  const auto n4 = lt_pow(LogTower::from_real(2), 65536);
  const auto n5 = lt_exp({false, lt_mul(n4, LogTower::from_real(std::log(2.0L)))});
  EXPECT_EQ(n5.level(), 2);
  EXPECT_GT(n5, n4);
  EXPECT_LT(lt_reciprocal(n5), lt_reciprocal(n4));
}

TEST(LogTower, LevelCapIsEnforced) {
  EXPECT_THROW(LogTower::from_parts(LogTower::kMaxLevel, 1e16L), std::domain_error);
  EXPECT_TRUE(LogTower::from_parts(LogTower::kMaxLevel, 1e16L, true).is_zero());
  EXPECT_THROW(LogTower::from_real(-1), std::domain_error);
  EXPECT_THROW(LogTower::from_real(INFINITY), std::domain_error);
}

TEST(LogTower, TextRoundTrip) {
  for (const char* s : {"T0:1", "T0:0", "T1:45426.092", "T-1:46.05", "T3:1234.5", "T0:0.0625"}) {
    const auto x = LogTower::parse(s);
    EXPECT_EQ(LogTower::parse(x.to_string()), x) << s;
  }
  EXPECT_EQ(LogTower::from_real(2).to_string(), "T0:2");
  EXPECT_EQ(LogTower::parse("T-1:46.05").reciprocal(), true);
}

TEST(LogTower, RandomTextRoundTripIsExact) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const int level = static_cast<int>(rng.index(0, 6));
    const bool recip = level > 0 && rng.uniform() < 0.5;
    const long double v = level == 0 ? rng.uniform(1e-6, 1e6) : rng.uniform(40, 1e6);
    const auto x = LogTower::from_parts(level, v, recip);
    EXPECT_EQ(LogTower::parse(x.to_string()), x);
  }
}

TEST(LogTower, ParseRejectsMalformedText) {
  for (const char* s : {"", "T", "T0", "X0:1", "T0:", "T-0:1", "T1:abc", "T0:1x", "T:1"}) {
    EXPECT_THROW(LogTower::parse(s), std::invalid_argument) << s;
  }
}

TEST(LogTower, OrderMatchesRealOrder) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const long double a = std::pow(10.0L, rng.uniform(-40, 40));
    const long double b = std::pow(10.0L, rng.uniform(-40, 40));
    EXPECT_EQ(LogTower::from_real(a) < LogTower::from_real(b), a < b);
  }
}

TEST(LogTower, ArithmeticMatchesPlainArithmetic) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const long double a = std::pow(10.0L, rng.uniform(-30, 30));
    const long double b = std::pow(10.0L, rng.uniform(-30, 30));
    const auto A = LogTower::from_real(a), B = LogTower::from_real(b);
    EXPECT_NEAR(static_cast<double>(lt_mul(A, B).to_real() / (a * b)), 1.0, 1e-12);
    EXPECT_NEAR(static_cast<double>(lt_div(A, B).to_real() / (a / b)), 1.0, 1e-12);
    EXPECT_NEAR(static_cast<double>(lt_add(A, B).to_real() / (a + b)), 1.0, 1e-12);
    const long double e = rng.uniform(-3, 3);
    EXPECT_NEAR(static_cast<double>(ln_of(lt_pow(A, e)) / (e * std::log(a))), 1.0, 1e-9);
  }
}

TEST(LogTower, AdditionAbsorbsNegligibleSummands) {
  const auto big = lt_pow(LogTower::from_real(2), 65536);
  EXPECT_EQ(lt_add(big, LogTower::one()), big);
  EXPECT_EQ(lt_add(LogTower::one(), big), big);
  EXPECT_EQ(lt_add(big, LogTower{}), big);
  const auto doubled = lt_add(big, big);
  EXPECT_NEAR(static_cast<double>(ln_of(lt_div(doubled, big))), std::log(2.0), 1e-9);
}

TEST(LogTower, AbsoluteDifference) {
  const auto a = LogTower::from_real(1e30L), b = LogTower::from_real(4e29L);
  EXPECT_NEAR(static_cast<double>(lt_abs_diff(a, b).to_real() / 6e29L), 1.0, 1e-12);
  EXPECT_TRUE(lt_abs_diff(a, a).is_zero());
  EXPECT_THROW(lt_abs_diff(b, a), std::domain_error);
}

TEST(LogTower, LogAndExpAreInverse) {
  for (long double x : {1e-300L, 1e-20L, 0.5L, 1.0L, 3.0L, 1e20L, 1e300L}) {
    const auto X = LogTower::from_real(x);
    EXPECT_TRUE(lt_close(lt_exp(lt_log(X)), X, 1e-12L)) << static_cast<double>(x);
  }
}

TEST(LogTower, DivisionByZeroThrows) {
  EXPECT_THROW(lt_div(LogTower::one(), LogTower{}), std::domain_error);
  EXPECT_THROW(lt_log(LogTower{}), std::domain_error);
  EXPECT_THROW(lt_pow(LogTower{}, -1), std::domain_error);
}

TEST(LogTower, RelativeGap) {
  const auto a = LogTower::from_real(100), b = LogTower::from_real(101);
  EXPECT_NEAR(static_cast<double>(top_level_relative_gap(a, b)), 1.0 / 101, 1e-15);
  EXPECT_EQ(top_level_relative_gap(a, a), 0);
  EXPECT_EQ(top_level_relative_gap(a, LogTower{}), 1);
  EXPECT_TRUE(lt_close(a, b, 0.01L));
  EXPECT_FALSE(lt_close(a, b, 0.001L));
}

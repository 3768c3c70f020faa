#pragma once

// Level-indexed positive scalars.
//
// A LogTower stores a magnitude as exp applied `level` times to a stored top
// component v, optionally inverted:
//
//     value = exp^(level)(v)          (reciprocal == false)
//     value = 1 / exp^(level)(v)      (reciprocal == true, level >= 1)
//
// Canonical forms (E = 1e15):
//   * zero is (0, 0);
//   * level 0 holds v in (1/E, E);
//   * level >= 1 holds v in [ln E, E).
// Reciprocal towers only exist at level >= 1 and cover the values below 1/E.
// Every operation returns a canonical value.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace klab {

class LogTower {
 public:
  static constexpr long double kBand = 1e15L;
  static inline const long double kLogBand = std::log(1e15L);
  static constexpr int kMaxLevel = 8;
  /// Log-gap above which the smaller summand is absorbed by lt_add.
  static constexpr long double kDominance = 40.0L;

  constexpr LogTower() = default;

  /// Normalizes an arbitrary (level, v, reciprocal) triple.
  static LogTower from_parts(int level, long double v, bool reciprocal = false) {
    if (level < 0 || !std::isfinite(v)) {
      throw std::domain_error("LogTower: invalid parts");
    }
    if (level == 0) {
      if (v < 0) throw std::domain_error("LogTower: negative magnitude");
      if (reciprocal) {
        if (v == 0) throw std::domain_error("LogTower: reciprocal of zero");
        v = 1.0L / v;
      }
      if (v == 0) return LogTower{};
      if (v >= kBand) return from_parts(1, std::log(v), false);
      if (v <= 1.0L / kBand) return from_parts(1, -std::log(v), true);
      return LogTower(0, v, false);
    }
    while (v >= kBand) {
      v = std::log(v);
      ++level;
      if (level > kMaxLevel) {
        if (reciprocal) return LogTower{};  // below every representable magnitude
        throw std::domain_error("LogTower: level cap exceeded");
      }
    }
    while (level > 1 && v < kLogBand) {
      v = std::exp(v);
      --level;
    }
    if (level == 1 && v < kLogBand) {
      const long double lnx = reciprocal ? -v : v;
      if (lnx > -kLogBand) {
        const long double x = std::exp(lnx);
        if (x > 1.0L / kBand && x < kBand) return LogTower(0, x, false);
      }
      if (lnx < 0) return LogTower(1, std::max(-lnx, kLogBand), true);
      return LogTower(1, std::max(lnx, kLogBand), false);
    }
    if (level > kMaxLevel) {
      if (reciprocal) return LogTower{};
      throw std::domain_error("LogTower: level cap exceeded");
    }
    return LogTower(level, v, reciprocal);
  }

  static LogTower from_real(long double x) {
    if (!std::isfinite(x) || x < 0) {
      throw std::domain_error("LogTower: input must be finite and non-negative");
    }
    return from_parts(0, x, false);
  }

  static LogTower one() { return LogTower(0, 1.0L, false); }

  int level() const { return level_; }
  long double top() const { return v_; }
  bool reciprocal() const { return recip_; }
  bool is_zero() const { return level_ == 0 && v_ == 0; }
  /// True for level-0 values, which are held as plain reals.
  bool is_plain() const { return level_ == 0; }

  bool is_canonical() const {
    if (level_ == 0) return !recip_ && (v_ == 0 || (v_ > 1.0L / kBand && v_ < kBand));
    return level_ <= kMaxLevel && v_ >= kLogBand && v_ < kBand;
  }

  /// Decodes to a real; overflows to +inf and underflows to 0.
  long double to_real() const {
    if (level_ == 0) return v_;
    long double x = v_;
    for (int i = 0; i < level_; ++i) {
      x = std::exp(x);
      if (std::isinf(x)) break;
    }
    return recip_ ? 1.0L / x : x;
  }

  /// "T{level}:{v}"; reciprocal towers carry a negative level.
  std::string to_string() const {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v_);
    std::string out = "T";
    if (recip_) out += '-';
    out += std::to_string(level_);
    out += ':';
    out.append(buf, res.ptr);
    return out;
  }

  static LogTower parse(std::string_view text) {
    auto fail = [&] {
      return std::invalid_argument("LogTower: cannot parse '" + std::string(text) + "'");
    };
    if (text.size() < 4 || text.front() != 'T') throw fail();
    std::size_t pos = 1;
    bool recip = false;
    if (text[pos] == '-') {
      recip = true;
      ++pos;
    }
    const auto colon = text.find(':', pos);
    if (colon == std::string_view::npos) throw fail();
    int level = 0;
    auto lres = std::from_chars(text.data() + pos, text.data() + colon, level);
    if (lres.ec != std::errc{} || lres.ptr != text.data() + colon) throw fail();
    long double v = 0;
    auto vres = std::from_chars(text.data() + colon + 1, text.data() + text.size(), v);
    if (vres.ec != std::errc{} || vres.ptr != text.data() + text.size()) throw fail();
    if (recip && level == 0) throw fail();
    return from_parts(level, v, recip);
  }

  friend bool operator==(const LogTower&, const LogTower&) = default;

  friend std::partial_ordering operator<=>(const LogTower& a, const LogTower& b) {
    const auto ka = a.order_key();
    const auto kb = b.order_key();
    if (ka.cls != kb.cls) return ka.cls <=> kb.cls;
    if (ka.slevel != kb.slevel) return ka.slevel <=> kb.slevel;
    return ka.w <=> kb.w;
  }

 private:
  constexpr LogTower(int level, long double v, bool recip) : level_(level), v_(v), recip_(recip) {}

  struct OrderKey {
    int cls;
    int slevel;
    long double w;
  };
  OrderKey order_key() const {
    if (is_zero()) return {0, 0, 0};
    if (recip_) return {1, -level_, -v_};
    return {1, level_, v_};
  }

  int level_ = 0;
  long double v_ = 0;
  bool recip_ = false;
};

/// A real number whose magnitude is a LogTower; used for logarithms.
struct SignedTower {
  bool negative = false;
  LogTower magnitude;

  bool is_zero() const { return magnitude.is_zero(); }
  SignedTower operator-() const {
    return magnitude.is_zero() ? *this : SignedTower{!negative, magnitude};
  }
};

LogTower lt_mul(const LogTower& a, const LogTower& b);
LogTower lt_add(const LogTower& a, const LogTower& b);
LogTower lt_abs_diff(const LogTower& a, const LogTower& b);

inline LogTower lt_from_real(long double x) { return LogTower::from_real(x); }

/// Natural logarithm of a positive tower.
inline SignedTower lt_log(const LogTower& x) {
  if (x.is_zero()) throw std::domain_error("lt_log: logarithm of zero");
  if (x.level() == 0) {
    const long double l = std::log(x.top());
    return {l < 0, LogTower::from_real(std::fabs(l))};
  }
  return {x.reciprocal(), LogTower::from_parts(x.level() - 1, x.top(), false)};
}

inline LogTower lt_exp(const SignedTower& s) {
  const LogTower& m = s.magnitude;
  if (m.is_zero()) return LogTower::one();
  if (m.reciprocal()) {
    // |s| < 1/E: exp(s) = 1 + s within the top-level precision contract.
    const long double t = m.to_real();
    return LogTower::from_real(std::exp(s.negative ? -t : t));
  }
  if (m.level() == 0) {
    const long double y = s.negative ? -m.top() : m.top();
    if (std::fabs(y) < LogTower::kLogBand) return LogTower::from_real(std::exp(y));
    return LogTower::from_parts(1, std::fabs(y), s.negative);
  }
  return LogTower::from_parts(m.level() + 1, m.top(), s.negative);
}

inline SignedTower signed_add(const SignedTower& s, const SignedTower& t) {
  if (s.is_zero()) return t;
  if (t.is_zero()) return s;
  if (s.negative == t.negative) return {s.negative, lt_add(s.magnitude, t.magnitude)};
  if (s.magnitude >= t.magnitude) {
    auto d = lt_abs_diff(s.magnitude, t.magnitude);
    return {d.is_zero() ? false : s.negative, d};
  }
  return {t.negative, lt_abs_diff(t.magnitude, s.magnitude)};
}

inline SignedTower signed_scale(const SignedTower& s, long double factor) {
  if (!std::isfinite(factor)) throw std::domain_error("signed_scale: non-finite factor");
  if (factor == 0 || s.is_zero()) return {};
  return {s.negative != (factor < 0), lt_mul(s.magnitude, LogTower::from_real(std::fabs(factor)))};
}

inline LogTower lt_mul(const LogTower& a, const LogTower& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_plain() && b.is_plain()) return LogTower::from_real(a.top() * b.top());
  return lt_exp(signed_add(lt_log(a), lt_log(b)));
}

inline LogTower lt_reciprocal(const LogTower& a) {
  if (a.is_zero()) throw std::domain_error("lt_div: division by zero");
  if (a.is_plain()) return LogTower::from_real(1.0L / a.top());
  return LogTower::from_parts(a.level(), a.top(), !a.reciprocal());
}

inline LogTower lt_div(const LogTower& a, const LogTower& b) {
  if (b.is_zero()) throw std::domain_error("lt_div: division by zero");
  if (a.is_zero()) return {};
  if (a.is_plain() && b.is_plain()) return LogTower::from_real(a.top() / b.top());
  return lt_mul(a, lt_reciprocal(b));
}

inline LogTower lt_pow(const LogTower& a, long double e) {
  if (!std::isfinite(e)) throw std::domain_error("lt_pow: non-finite exponent");
  if (a.is_zero()) {
    if (e <= 0) throw std::domain_error("lt_pow: zero to a non-positive power");
    return {};
  }
  if (e == 0) return LogTower::one();
  if (e == 1) return a;
  if (a.is_plain()) {
    const long double r = std::pow(a.top(), e);
    if (std::isfinite(r) && r > 1.0L / LogTower::kBand && r < LogTower::kBand) {
      return LogTower::from_real(r);
    }
  }
  return lt_exp(signed_scale(lt_log(a), e));
}

inline LogTower lt_add(const LogTower& a, const LogTower& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_plain() && b.is_plain()) return LogTower::from_real(a.top() + b.top());
  const LogTower& hi = a >= b ? a : b;
  const LogTower& lo = a >= b ? b : a;
  const SignedTower gap = signed_add(lt_log(hi), -lt_log(lo));
  if (gap.magnitude > LogTower::from_real(LogTower::kDominance)) return hi;
  const long double g = gap.magnitude.to_real();
  const SignedTower bump{false, LogTower::from_real(std::log1p(std::exp(-g)))};
  return lt_exp(signed_add(lt_log(hi), bump));
}

/// |a - b| for a >= b; throws when a < b.
inline LogTower lt_abs_diff(const LogTower& a, const LogTower& b) {
  if (a < b) throw std::domain_error("lt_abs_diff: first argument must dominate");
  if (b.is_zero()) return a;
  if (a == b) return {};
  if (a.is_plain() && b.is_plain()) return LogTower::from_real(a.top() - b.top());
  const SignedTower gap = signed_add(lt_log(a), -lt_log(b));
  if (gap.magnitude > LogTower::from_real(LogTower::kDominance)) return a;
  const long double g = gap.magnitude.to_real();
  if (g == 0) return {};
  const long double factor = -std::expm1(-g);
  const SignedTower shrink{true, LogTower::from_real(-std::log(factor))};
  return lt_exp(signed_add(lt_log(a), shrink));
}

inline std::partial_ordering lt_cmp(const LogTower& a, const LogTower& b) { return a <=> b; }

inline LogTower operator*(const LogTower& a, const LogTower& b) { return lt_mul(a, b); }
inline LogTower operator/(const LogTower& a, const LogTower& b) { return lt_div(a, b); }
inline LogTower operator+(const LogTower& a, const LogTower& b) { return lt_add(a, b); }

inline LogTower lt_max(const LogTower& a, const LogTower& b) { return a >= b ? a : b; }

/// Relative difference of the top-level stored components after bringing
/// both values to a common level. This is the precision measure used for
/// all tolerances: plain relative error at level 0, log-relative at level 1,
/// log-of-log relative at level 2, and so on. Returns 1 when the values are
/// more than one level apart.
inline long double top_level_relative_gap(const LogTower& a, const LogTower& b) {
  if (a == b) return 0;
  if (a.is_zero() || b.is_zero()) return 1;
  auto slevel = [](const LogTower& x) { return x.reciprocal() ? -x.level() : x.level(); };
  auto rel = [](long double x, long double y) {
    const long double scale = std::max(std::fabs(x), std::fabs(y));
    return scale == 0 ? 0.0L : std::min(1.0L, std::fabs(x - y) / scale);
  };
  const int sa = slevel(a);
  const int sb = slevel(b);
  if (sa == sb) return rel(a.top(), b.top());
  if (std::abs(sa - sb) != 1) return 1;
  // Adjacent levels: lower the higher-level value once and compare there.
  const LogTower& hi = std::abs(sa) > std::abs(sb) ? a : b;
  const LogTower& lo = std::abs(sa) > std::abs(sb) ? b : a;
  if (hi.top() > 11000) return 1;
  long double lowered = std::exp(hi.top());
  if (hi.level() == 1) lowered = hi.reciprocal() ? 1.0L / lowered : lowered;
  return rel(lowered, lo.top());
}

inline bool lt_close(const LogTower& a, const LogTower& b, long double rel) {
  return top_level_relative_gap(a, b) <= rel;
}

}  // namespace klab

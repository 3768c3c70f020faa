#pragma once

// Seeded generators for randomized property runs. The transforms are written
// out by hand so the same seed gives the same stream on every standard library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "klab/seqvector.hpp"

namespace klab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  std::uint64_t index(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("Rng::index: empty range");
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return eng_();
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return lo + x % span;
  }

  /// Standard normal (Box-Muller, one value per call).
  double normal() {
    const double u = 1.0 - uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  Complex complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

/// Dense complex vector on [1, n] with |x_j| ~ exp(-decay * j).
inline SeqVector random_decaying_vector(Rng& rng, std::size_t n, double decay) {
  std::vector<Complex> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = rng.complex_normal() * std::exp(-decay * static_cast<double>(j + 1));
  return SeqVector::from_dense(v);
}

/// Random support of size at most n inside [1, dim] with O(1) entries.
inline SeqVector random_truncated_vector(Rng& rng, std::size_t dim, std::size_t n) {
  std::vector<Complex> v(dim);
  const std::size_t len = static_cast<std::size_t>(rng.index(1, n));
  for (std::size_t i = 0; i < len; ++i) v[rng.index(0, dim - 1)] = rng.complex_normal();
  return SeqVector::from_dense(v);
}

}  // namespace klab

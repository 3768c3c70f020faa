#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace klab {

using Complex = std::complex<double>;

/// Finitely supported complex sequence indexed from 1. Stored sparse, with
/// strictly increasing indices and no stored zeros.
class SeqVector {
 public:
  SeqVector() = default;

  SeqVector(std::vector<std::size_t> indices, std::vector<Complex> values) {
    if (indices.size() != values.size()) {
      throw std::invalid_argument("SeqVector: index/value length mismatch");
    }
    std::vector<std::size_t> order(indices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return indices[a] < indices[b]; });
    for (std::size_t i : order) {
      if (indices[i] == 0) throw std::invalid_argument("SeqVector: indices start at 1");
      if (!idx_.empty() && idx_.back() == indices[i]) {
        throw std::invalid_argument("SeqVector: duplicate index");
      }
      if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
        throw std::invalid_argument("SeqVector: non-finite value");
      }
      if (values[i] == Complex{}) continue;
      idx_.push_back(indices[i]);
      val_.push_back(values[i]);
    }
  }

  /// Dense input: element i of `values` is coordinate i + 1.
  static SeqVector from_dense(std::span<const Complex> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{1});
    return SeqVector(std::move(idx), std::vector<Complex>(values.begin(), values.end()));
  }

  static SeqVector unit(std::size_t k, Complex value = 1.0) { return SeqVector({k}, {value}); }

  /// e_I: ones on the index set I.
  static SeqVector indicator(std::span<const std::size_t> set) {
    return SeqVector(std::vector<std::size_t>(set.begin(), set.end()),
                     std::vector<Complex>(set.size(), 1.0));
  }

  std::span<const std::size_t> support() const { return idx_; }
  std::span<const Complex> values() const { return val_; }
  std::size_t nnz() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  std::size_t max_index() const { return idx_.empty() ? 0 : idx_.back(); }

  Complex at(std::size_t j) const {
    auto it = std::lower_bound(idx_.begin(), idx_.end(), j);
    if (it == idx_.end() || *it != j) return {};
    return val_[static_cast<std::size_t>(it - idx_.begin())];
  }

  std::vector<Complex> to_dense(std::size_t n) const {
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      if (idx_[i] <= n) out[idx_[i] - 1] = val_[i];
    }
    return out;
  }

  friend bool operator==(const SeqVector&, const SeqVector&) = default;

  friend SeqVector operator*(Complex s, const SeqVector& x) {
    std::vector<Complex> v(x.val_);
    for (auto& c : v) c *= s;
    return SeqVector(x.idx_, std::move(v));
  }

  friend SeqVector operator+(const SeqVector& x, const SeqVector& y) {
    return combine(x, y, [](Complex a, Complex b) { return a + b; });
  }
  friend SeqVector operator-(const SeqVector& x, const SeqVector& y) {
    return combine(x, y, [](Complex a, Complex b) { return a - b; });
  }
  /// Pointwise product (the Köthe-algebra multiplication).
  friend SeqVector hadamard_product(const SeqVector& x, const SeqVector& y) {
    return combine(x, y, [](Complex a, Complex b) { return a * b; });
  }
  friend SeqVector conj(const SeqVector& x) {
    std::vector<Complex> v(x.val_);
    for (auto& c : v) c = std::conj(c);
    return SeqVector(x.idx_, std::move(v));
  }

 private:
  template <class Op>
  static SeqVector combine(const SeqVector& x, const SeqVector& y, Op op) {
    std::vector<std::size_t> idx;
    std::vector<Complex> val;
    std::size_t i = 0, j = 0;
    while (i < x.idx_.size() || j < y.idx_.size()) {
      if (j == y.idx_.size() || (i < x.idx_.size() && x.idx_[i] < y.idx_[j])) {
        idx.push_back(x.idx_[i]);
        val.push_back(op(x.val_[i++], Complex{}));
      } else if (i == x.idx_.size() || y.idx_[j] < x.idx_[i]) {
        idx.push_back(y.idx_[j]);
        val.push_back(op(Complex{}, y.val_[j++]));
      } else {
        idx.push_back(x.idx_[i]);
        val.push_back(op(x.val_[i++], y.val_[j++]));
      }
    }
    return SeqVector(std::move(idx), std::move(val));
  }

  std::vector<std::size_t> idx_;
  std::vector<Complex> val_;
};

/// <x, y> = sum_j x_j conj(y_j); conjugate-linear in the second slot.
inline Complex pairing(const SeqVector& x, const SeqVector& y) {
  Complex acc{};
  auto xi = x.support(), yi = y.support();
  auto xv = x.values(), yv = y.values();
  std::size_t i = 0, j = 0;
  while (i < xi.size() && j < yi.size()) {
    if (xi[i] < yi[j]) {
      ++i;
    } else if (yi[j] < xi[i]) {
      ++j;
    } else {
      acc += xv[i++] * std::conj(yv[j++]);
    }
  }
  return acc;
}

inline double l2_norm(const SeqVector& x) {
  long double acc = 0;
  for (const auto& c : x.values()) acc += static_cast<long double>(std::norm(c));
  return static_cast<double>(std::sqrt(acc));
}

}  // namespace klab

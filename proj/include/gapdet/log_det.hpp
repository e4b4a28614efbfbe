// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gapdet/errors.hpp"
#include "gapdet/extended_real.hpp"

namespace gapdet {

/// Dense row-major n x n matrix.
template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, const T& fill = T{}) : n_(n), data_(n * n, fill) {}

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n, T(0.0));
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * n_, n_}; }
  std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }

  void swap_rows(std::size_t a, std::size_t b) noexcept {
    if (a == b) return;
    for (std::size_t j = 0; j < n_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

template <class T>
struct LogDetResult {
  T log_abs_det{};
  int sign = 1;
  T pivot_min{};   // smallest |pivot|, a conditioning diagnostic
};

namespace detail {
inline bool finite_entry(double v) { return std::isfinite(v); }
inline bool finite_entry(const ExtendedReal& v) { return isfinite(v); }
inline double magnitude(double v) { return std::abs(v); }
inline ExtendedReal magnitude(const ExtendedReal& v) { return abs(v); }
inline double logarithm(double v) { return std::log(v); }
inline ExtendedReal logarithm(const ExtendedReal& v) { return log(v); }
}  // namespace detail

/// log|det A| and sign(det A) by LU with partial pivoting, carried out in T.
/// The matrix is taken by value and factored in place.
template <class T>
LogDetResult<T> log_det_lu(SquareMatrix<T> a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!detail::finite_entry(a(i, j))) {
        throw std::invalid_argument("log_det_lu: non-finite matrix entry");
      }
    }
  }
  LogDetResult<T> out;
  out.log_abs_det = T(0.0);
  out.sign = 1;
  if (n == 0) {
    out.pivot_min = T(1.0);
    return out;
  }
  bool first = true;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    T best = detail::magnitude(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const T m = detail::magnitude(a(i, k));
      if (m > best) {
        best = m;
        p = i;
      }
    }
    if (best == T(0.0)) throw singular_matrix_error(k);
    if (p != k) {
      a.swap_rows(p, k);
      out.sign = -out.sign;
    }
    const T pivot = a(k, k);
    if (pivot < T(0.0)) out.sign = -out.sign;
    out.log_abs_det += detail::logarithm(best);
    if (first || best < out.pivot_min) out.pivot_min = best;
    first = false;

    const auto prow = a.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto r = a.row(i);
      if (r[k] == T(0.0)) continue;
      const T factor = r[k] / pivot;
      for (std::size_t j = k + 1; j < n; ++j) r[j] -= factor * prow[j];
    }
  }
  return out;
}

}  // namespace gapdet

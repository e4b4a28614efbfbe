// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "gapdet/errors.hpp"
#include "gapdet/extended_real.hpp"

namespace gapdet {

/// Gauss-Legendre rule on [-1, 1]: nodes strictly increasing, weights positive.
struct QuadratureRule {
  int order = 0;
  std::vector<ExtendedReal> nodes;
  std::vector<ExtendedReal> weights;
};

namespace detail {

struct LegendreEval {
  ExtendedReal p;      // P_n(x)
  ExtendedReal dp;     // P_n'(x)
};

template <class Real>
void legendre_pair(int n, const Real& x, Real& pn, Real& pn1) {
  Real p1 = 1.0;
  Real p2 = 0.0;
  for (int j = 1; j <= n; ++j) {
    const Real p3 = p2;
    p2 = p1;
    p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / static_cast<double>(j);
  }
  pn = p1;
  pn1 = p2;
}

inline LegendreEval legendre_dd(int n, const ExtendedReal& x) {
  ExtendedReal pn, pn1;
  legendre_pair(n, x, pn, pn1);
  const ExtendedReal dp = static_cast<double>(n) * (x * pn - pn1) / (x * x - 1.0);
  return {pn, dp};
}

}  // namespace detail

/// Computes the n-point Gauss-Legendre rule. Roots come from Newton's method
/// in binary64 started at cos(pi (i + 3/4) / (n + 1/2)) and are then polished
/// by three Newton steps in double-double.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1 || n > 2000) {
    throw range_error("gauss_legendre: order must lie in [1, 2000], got " + std::to_string(n));
  }
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      double pn, pn1;
      detail::legendre_pair(n, z, pn, pn1);
      const double dp = n * (z * pn - pn1) / (z * z - 1.0);
      const double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) <= 1e-14) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw convergence_error("gauss_legendre: Newton failed to converge for root index " +
                              std::to_string(i) + " of order " + std::to_string(n));
    }
    ExtendedReal x(z);
    const bool middle = (n % 2 == 1) && (i == half - 1);
    if (middle) x = 0.0;
    detail::LegendreEval ev{};
    for (int guard = 0; guard < 3 && !middle; ++guard) {
      ev = detail::legendre_dd(n, x);
      x -= ev.p / ev.dp;
    }
    ev = detail::legendre_dd(n, x);
    const ExtendedReal w = 2.0 / ((1.0 - x * x) * ev.dp * ev.dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  return rule;
}

/// Process-wide memoized rule; safe to call concurrently.
inline std::shared_ptr<const QuadratureRule> gauss_legendre_cached(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const QuadratureRule>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  auto rule = std::make_shared<const QuadratureRule>(gauss_legendre(n));
  std::lock_guard lock(mu);
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace gapdet

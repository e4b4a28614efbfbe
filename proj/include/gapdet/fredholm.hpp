// SPDX-License-Identifier: MIT
//
// log det(I - K) on (-s, s) by Nystrom discretization
//   M[i][j] = delta_ij - sqrt(w_i w_j) K(x_i, x_j)
// on an n-point Gauss-Legendre rule. Entries are assembled in binary64 and
// factored in double-double.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gapdet/errors.hpp"
#include "gapdet/extended_real.hpp"
#include "gapdet/kernels.hpp"
#include "gapdet/log_det.hpp"
#include "gapdet/parallel.hpp"
#include "gapdet/quadrature.hpp"

namespace gapdet {

struct DetEvaluation {
  KernelSpec spec;
  double s = 0.0;
  int n = 0;
  ExtendedReal log_det;
  ExtendedReal pivot_min;
  bool converged = false;  // set only by log_det_converged
};

inline constexpr int min_nystrom_order = 8;
inline constexpr int max_nystrom_order = 400;
inline constexpr double self_convergence_tol = 1e-8;

namespace fredholm_detail {

inline bool is_bounded(const KernelSpec& spec) {
  if (std::holds_alternative<PainleveKernel>(spec)) return true;
  if (const auto* c = std::get_if<CubicSineKernel>(&spec)) return c->t > 0.0;
  return false;
}

/// Largest admissible half-width. The sine family is limited through s |x|,
/// which keeps log det above about -128 as for the cubic kernels at s = 2.4.
inline double s_limit(const KernelSpec& spec) {
  if (is_bounded(spec)) return 2.4;
  const double x = std::abs(kernel_x(spec));
  return x > 0.0 ? 16.0 / x : std::numeric_limits<double>::infinity();
}

/// Beyond this half-width double-double loses digits in log det; results there
/// count as converged only while pivot_min stays above 1e-28.
inline double trusted_s(const KernelSpec& spec) {
  if (is_bounded(spec)) return 2.1;
  const double x = std::abs(kernel_x(spec));
  return x > 0.0 ? 12.0 / x : std::numeric_limits<double>::infinity();
}

inline void check_arguments(const KernelSpec& spec, double s, int n) {
  kernel_detail::check_spec(spec);
  if (!(s >= 0.0 && s <= s_limit(spec))) {
    std::ostringstream msg;
    msg << "log_det: s = " << s << " outside [0, " << s_limit(spec) << "] for the "
        << kernel_name(spec) << " kernel";
    throw range_error(msg.str());
  }
  if (n < min_nystrom_order || n > max_nystrom_order) {
    throw range_error("log_det: quadrature order " + std::to_string(n) + " outside [8, 400]");
  }
}

struct Nodes {
  std::vector<double> x;
  std::vector<double> sqrt_w;
};

inline Nodes nodes(double s, int n) {
  const auto rule = gauss_legendre_cached(n);
  Nodes out;
  out.x.resize(static_cast<std::size_t>(n));
  out.sqrt_w.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    out.x[i] = s * rule->nodes[i].to_double();
    out.sqrt_w[i] = std::sqrt(s * rule->weights[i].to_double());
  }
  return out;
}

inline void warm_cache(const KernelSpec& spec, const std::vector<double>& x) {
  if (const auto* p = std::get_if<PainleveKernel>(&spec)) {
    const PsiField& f = *p->field;
    parallel_for(x.size(), [&](std::size_t i) { f.column(x[i]); });
  }
}

}  // namespace fredholm_detail

/// Weighted kernel matrix sqrt(w_i w_j) K(x_i, x_j); symmetric by construction.
inline SquareMatrix<double> kernel_matrix(const KernelSpec& spec, double s, int n) {
  fredholm_detail::check_arguments(spec, s, n);
  const auto nd = fredholm_detail::nodes(s, n);
  fredholm_detail::warm_cache(spec, nd.x);
  const auto size = static_cast<std::size_t>(n);
  SquareMatrix<double> a(size, 0.0);
  parallel_for(size, [&](std::size_t i) {
    a(i, i) = nd.sqrt_w[i] * nd.sqrt_w[i] * kernel_diag(spec, nd.x[i]);
    for (std::size_t j = i + 1; j < size; ++j) {
      a(i, j) = nd.sqrt_w[i] * nd.sqrt_w[j] * kernel_eval(spec, nd.x[i], nd.x[j]);
    }
  });
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  return a;
}

inline DetEvaluation log_det(const KernelSpec& spec, double s, int n) {
  fredholm_detail::check_arguments(spec, s, n);
  DetEvaluation out{spec, s, n, ExtendedReal(0.0), ExtendedReal(1.0), false};
  if (s == 0.0) return out;
  const SquareMatrix<double> k = kernel_matrix(spec, s, n);
  const auto size = static_cast<std::size_t>(n);
  SquareMatrix<ExtendedReal> m(size);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) m(i, j) = ExtendedReal((i == j ? 1.0 : 0.0)) - k(i, j);
  const auto lu = log_det_lu(std::move(m));
  if (lu.sign <= 0) {
    throw integrity_error("log_det: det(I - K) is not positive for the " + kernel_name(spec) +
                          " kernel at s = " + std::to_string(s));
  }
  if (lu.log_abs_det > ExtendedReal(0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "log_det: positive value " << lu.log_abs_det.to_double() << " for the "
        << kernel_name(spec) << " kernel at s = " << s;
    throw integrity_error(msg.str());
  }
  out.log_det = lu.log_abs_det;
  out.pivot_min = lu.pivot_min;
  return out;
}

/// Doubles n from 32 until successive values agree within 1e-8 or n would
/// exceed 400; returns the last evaluation.
inline DetEvaluation log_det_converged(const KernelSpec& spec, double s) {
  DetEvaluation prev = log_det(spec, s, 32);
  if (s == 0.0) {
    prev.converged = true;
    return prev;
  }
  for (int n = 64; n <= max_nystrom_order; n *= 2) {
    DetEvaluation cur = log_det(spec, s, n);
    const double delta = std::abs((cur.log_det - prev.log_det).to_double());
    if (delta <= self_convergence_tol) {
      cur.converged = s <= fredholm_detail::trusted_s(spec) || cur.pivot_min > ExtendedReal(1e-28);
      return cur;
    }
    prev = std::move(cur);
  }
  return prev;
}

namespace fredholm_detail {

inline void check_step(double h, const char* who) {
  if (!(h > 0.0 && h <= 1e-3)) {
    throw range_error(std::string(who) + ": step h must lie in (0, 1e-3], got " +
                      std::to_string(h));
  }
}

}  // namespace fredholm_detail

/// d/ds log det by central differences at the order found converged at s.
inline double dlogdet_ds(const KernelSpec& spec, double s, double h) {
  fredholm_detail::check_step(h, "dlogdet_ds");
  if (!(s - h > 0.0)) throw range_error("dlogdet_ds: requires s - h > 0");
  const int n = log_det_converged(spec, s).n;
  const ExtendedReal hi = log_det(spec, s + h, n).log_det;
  const ExtendedReal lo = log_det(spec, s - h, n).log_det;
  return ((hi - lo) / (2.0 * h)).to_double();
}

/// d/dx log det by central differences in the kernel parameter x.
inline double dlogdet_dx(const KernelSpec& spec, double s, double h) {
  fredholm_detail::check_step(h, "dlogdet_dx");
  if (!(s > 0.0)) throw range_error("dlogdet_dx: requires s > 0");
  const int n = log_det_converged(spec, s).n;
  const double x = kernel_x(spec);
  const ExtendedReal hi = log_det(with_x(spec, x + h), s, n).log_det;
  const ExtendedReal lo = log_det(with_x(spec, x - h), s, n).log_det;
  return ((hi - lo) / (2.0 * h)).to_double();
}

}  // namespace gapdet

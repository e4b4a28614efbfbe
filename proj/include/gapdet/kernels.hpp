// SPDX-License-Identifier: MIT
//
// The three integrable kernels on the real line:
//   sine        sin(x(l - m)) / (pi (l - m))
//   cubic sine  sin(Phi) / (pi (l - m)),  Phi = (l - m)((4/3) t (l^2 + l m + m^2) + x)
//   Painleve II (psi21(l) psi11(m) - psi21(m) psi11(l)) / (2 pi (l - m))
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "gapdet/errors.hpp"
#include "gapdet/psi.hpp"

namespace gapdet {

struct SineKernel {
  double x = 0.0;
};

struct CubicSineKernel {
  double t = 1.0;
  double x = 0.0;
};

struct PainleveKernel {
  std::shared_ptr<const PsiField> field;
};

using KernelSpec = std::variant<SineKernel, CubicSineKernel, PainleveKernel>;

/// Below this separation the diagonal (Taylor) formula is used.
inline constexpr double near_diagonal_radius = 1e-6;
/// Below this separation a PII column is continued from the nearer argument.
inline constexpr double propagation_radius = 1e-3;
/// Largest tolerated imaginary part of a PII kernel value.
inline constexpr double imaginary_tolerance = 1e-7;

namespace kernel_detail {

inline void check_spec(const KernelSpec& spec) {
  if (const auto* c = std::get_if<CubicSineKernel>(&spec)) {
    if (!(c->t >= 0.0 && c->t <= 1.0)) {
      throw range_error("cubic sine kernel: t must lie in [0, 1], got " + std::to_string(c->t));
    }
  }
  if (const auto* p = std::get_if<PainleveKernel>(&spec); p && !p->field) {
    throw std::invalid_argument("painleve kernel: null psi field");
  }
}

/// The cubic-sine formula; t = 0 is the sine kernel.
inline double cubic_sine(double t, double x, double l, double m) {
  if (l < m) std::swap(l, m);  // exact symmetry under rounding
  const double d = l - m;
  const double g = 4.0 / 3.0 * t * (l * l + l * m + m * m) + x;
  if (std::abs(d) < near_diagonal_radius) {
    const double phi = d * g;
    return g / std::numbers::pi * (1.0 - phi * phi / 6.0);
  }
  return std::sin(d * g) / (std::numbers::pi * d);
}

inline double real_part_checked(cplx k, double l, double m) {
  if (!(std::abs(k.imag()) <= imaginary_tolerance) || !std::isfinite(k.real())) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "painleve kernel: value " << k << " at (" << l << ", " << m
        << ") has imaginary part above " << imaginary_tolerance;
    throw integrity_error(msg.str());
  }
  return k.real();
}

inline double painleve_diag(const PsiField& f, double l) {
  const PhaseExtractedColumn c = f.column(l);
  const auto dp = psi_column_derivative(f, l);
  const cplx k = (dp[1] * c.psi11() - dp[0] * c.psi21()) / (2.0 * std::numbers::pi);
  return real_part_checked(k, l, l);
}

inline double painleve(const PsiField& f, double l, double m) {
  const double a = std::min(l, m);
  const double b = std::max(l, m);
  const double d = b - a;
  if (d < near_diagonal_radius) return painleve_diag(f, 0.5 * (a + b));
  const PhaseExtractedColumn ca = f.column(a);
  const PhaseExtractedColumn cb = d < propagation_radius ? f.propagate(ca, b) : f.column(b);
  const cplx num = cb.psi21() * ca.psi11() - ca.psi21() * cb.psi11();
  return real_part_checked(num / (2.0 * std::numbers::pi * d), l, m);
}

inline void check_arguments(const KernelSpec& spec, double l, double m) {
  const bool bounded = std::holds_alternative<PainleveKernel>(spec) ||
                       (std::holds_alternative<CubicSineKernel>(spec) &&
                        std::get<CubicSineKernel>(spec).t > 0.0);
  if (!std::isfinite(l) || !std::isfinite(m) ||
      (bounded && (std::abs(l) > 4.0 || std::abs(m) > 4.0))) {
    throw range_error("kernel: arguments (" + std::to_string(l) + ", " + std::to_string(m) +
                      ") outside |lambda| <= 4");
  }
}

}  // namespace kernel_detail

inline double kernel_eval(const KernelSpec& spec, double lambda, double mu) {
  kernel_detail::check_spec(spec);
  kernel_detail::check_arguments(spec, lambda, mu);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SineKernel>) {
          return kernel_detail::cubic_sine(0.0, k.x, lambda, mu);
        } else if constexpr (std::is_same_v<K, CubicSineKernel>) {
          return kernel_detail::cubic_sine(k.t, k.x, lambda, mu);
        } else {
          return kernel_detail::painleve(*k.field, lambda, mu);
        }
      },
      spec);
}

inline double kernel_diag(const KernelSpec& spec, double lambda) {
  kernel_detail::check_spec(spec);
  kernel_detail::check_arguments(spec, lambda, lambda);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SineKernel>) {
          return kernel_detail::cubic_sine(0.0, k.x, lambda, lambda);
        } else if constexpr (std::is_same_v<K, CubicSineKernel>) {
          return kernel_detail::cubic_sine(k.t, k.x, lambda, lambda);
        } else {
          return kernel_detail::painleve_diag(*k.field, lambda);
        }
      },
      spec);
}

inline double kernel_x(const KernelSpec& spec) {
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PainleveKernel>) {
          return k.field->x();
        } else {
          return k.x;
        }
      },
      spec);
}

inline std::string kernel_name(const KernelSpec& spec) {
  switch (spec.index()) {
    case 0: return "sine";
    case 1: return "csin";
    default: return "pii";
  }
}

/// Same kernel family at another x. A PII field is rebuilt from its
/// Hastings-McLeod solution with the same Psi options.
inline KernelSpec with_x(const KernelSpec& spec, double x) {
  kernel_detail::check_spec(spec);
  return std::visit(
      [x](const auto& k) -> KernelSpec {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SineKernel>) {
          return SineKernel{x};
        } else if constexpr (std::is_same_v<K, CubicSineKernel>) {
          return CubicSineKernel{k.t, x};
        } else {
          if (!k.field->solution()) {
            throw std::invalid_argument("with_x: psi field carries no Hastings-McLeod solution");
          }
          return PainleveKernel{
              PsiField::from_solution(k.field->solution(), x, k.field->options())};
        }
      },
      spec);
}

}  // namespace gapdet

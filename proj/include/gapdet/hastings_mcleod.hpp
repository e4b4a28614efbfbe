// SPDX-License-Identifier: MIT
//
// Hastings-McLeod solution of Painleve II, u'' = x u + 2 u^3, with
// u ~ Ai(x) as x -> +inf and u ~ sqrt(-x/2) as x -> -inf.
//
// The boundary-value problem is discretized on a uniform grid by the
// three-point fourth-order compact (Numerov) scheme
//   u[i+1] - 2 u[i] + u[i-1] = h^2/12 (f[i+1] + 10 f[i] + f[i-1]),  f = x u + 2 u^3
// and solved by damped Newton iteration with a tridiagonal Jacobian.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gapdet/airy.hpp"
#include "gapdet/errors.hpp"

namespace gapdet {

/// Values of the Hastings-McLeod solution at one point: the parameters of the
/// Lax system. v = u_x^2 - x u^2 - u^4.
struct PainleveData {
  double x = 0.0;
  double u = 0.0;
  double u_x = 0.0;
  double v = 0.0;
};

class HastingsMcLeodSolution {
 public:
  HastingsMcLeodSolution(double x_left, double step, std::vector<double> u,
                         std::vector<double> u_x, std::vector<double> v,
                         std::vector<double> newton_trace)
      : x_left_(x_left),
        h_(step),
        u_(std::move(u)),
        u_x_(std::move(u_x)),
        v_(std::move(v)),
        newton_trace_(std::move(newton_trace)) {}

  double x_left() const noexcept { return x_left_; }
  double x_right() const noexcept { return x_left_ + h_ * static_cast<double>(u_.size() - 1); }
  double step() const noexcept { return h_; }
  std::size_t size() const noexcept { return u_.size(); }
  double grid_x(std::size_t i) const noexcept { return x_left_ + h_ * static_cast<double>(i); }

  std::span<const double> u() const noexcept { return u_; }
  std::span<const double> u_x() const noexcept { return u_x_; }
  std::span<const double> v() const noexcept { return v_; }
  std::span<const double> newton_trace() const noexcept { return newton_trace_; }

  bool contains(double x) const noexcept { return x >= x_left() && x <= x_right(); }

  double u_at(double x) const { return interpolate(u_, x, "u"); }
  double u_x_at(double x) const { return interpolate(u_x_, x, "u_x"); }
  double v_at(double x) const { return interpolate(v_, x, "v"); }

  PainleveData data_at(double x) const { return {x, u_at(x), u_x_at(x), v_at(x)}; }

  /// max |(u[i+1] - 2u[i] + u[i-1])/h^2 - (f[i+1] + 10 f[i] + f[i-1])/12| over
  /// interior nodes, i.e. the residual of the solved scheme in u'' units.
  double discrete_residual() const;

 private:
  double interpolate(const std::vector<double>& g, double x, const char* what) const {
    if (!contains(x)) {
      throw range_error(std::string("hastings-mcleod: ") + what + " queried at x = " +
                        std::to_string(x) + " outside the solved window");
    }
    const std::size_t n = g.size();
    const double s = (x - x_left_) / h_;
    std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor(s)) - 1;
    i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(n) - 4);
    const double t = s - static_cast<double>(i0);  // position relative to node i0
    // Cubic Lagrange through nodes i0 .. i0+3 (local abscissae 0, 1, 2, 3).
    const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    const auto k = static_cast<std::size_t>(i0);
    return l0 * g[k] + l1 * g[k + 1] + l2 * g[k + 2] + l3 * g[k + 3];
  }

  double x_left_;
  double h_;
  std::vector<double> u_, u_x_, v_;
  std::vector<double> newton_trace_;
};

namespace hm_detail {

inline double rhs(double x, double u) { return x * u + 2.0 * u * u * u; }
inline double rhs_du(double x, double u) { return x + 6.0 * u * u; }

inline double residual_norm(double x_left, double h, const std::vector<double>& u,
                            std::vector<double>* r_out) {
  const std::size_t n = u.size();
  const double c = h * h / 12.0;
  double norm = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double xm = x_left + h * static_cast<double>(i - 1);
    const double xi = x_left + h * static_cast<double>(i);
    const double xp = x_left + h * static_cast<double>(i + 1);
    const double r = (u[i + 1] - 2.0 * u[i] + u[i - 1]) -
                     c * (rhs(xp, u[i + 1]) + 10.0 * rhs(xi, u[i]) + rhs(xm, u[i - 1]));
    if (r_out) (*r_out)[i] = r;
    norm = std::max(norm, std::abs(r));
  }
  return norm / (h * h);
}

// Fourth-order first derivative: centered in the interior, one-sided at the ends.
inline std::vector<double> derivative4(const std::vector<double>& u, double h) {
  const std::size_t n = u.size();
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * h);
  }
  d[0] = (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / (12.0 * h);
  d[1] = (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / (12.0 * h);
  const std::size_t m = n - 1;
  d[m] = (25.0 * u[m] - 48.0 * u[m - 1] + 36.0 * u[m - 2] - 16.0 * u[m - 3] + 3.0 * u[m - 4]) /
         (12.0 * h);
  d[m - 1] = (3.0 * u[m] + 10.0 * u[m - 1] - 18.0 * u[m - 2] + 6.0 * u[m - 3] - u[m - 4]) /
             (12.0 * h);
  return d;
}

}  // namespace hm_detail

inline double HastingsMcLeodSolution::discrete_residual() const {
  return hm_detail::residual_norm(x_left_, h_, u_, nullptr);
}

/// Solves the Hastings-McLeod boundary-value problem on [x_left, x_right] with
/// u(x_left) = sqrt(-x_left/2) and u(x_right) = Ai(x_right). The step h is
/// shrunk, if needed, so that it divides the window exactly.
inline HastingsMcLeodSolution solve_hm(double x_left, double x_right, double h) {
  if (!(x_left <= -8.0) || !(x_right >= 6.0) || !(h > 0.0 && h <= 0.01)) {
    throw range_error("solve_hm: requires x_left <= -8, x_right >= 6, 0 < h <= 1/100");
  }
  if (x_right > 40.0) throw range_error("solve_hm: x_right beyond the Airy range");
  const auto cells = static_cast<std::size_t>(std::ceil((x_right - x_left) / h - 1e-9));
  const double step = (x_right - x_left) / static_cast<double>(cells);
  const std::size_t n = cells + 1;
  auto grid = [&](std::size_t i) { return x_left + step * static_cast<double>(i); };

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid(i);
    const double w = 1.0 / (1.0 + std::exp(3.0 * x));
    u[i] = w * std::sqrt(std::max(-x / 2.0, 0.0)) + (1.0 - w) * airy_ai(std::max(x, -10.0));
  }
  u.front() = std::sqrt(-x_left / 2.0);
  u.back() = airy_ai(x_right);

  const double c = step * step / 12.0;
  std::vector<double> r(n, 0.0), sub(n), diag(n), sup(n), delta(n), trial(n);
  std::vector<double> trace;
  double norm = hm_detail::residual_norm(x_left, step, u, &r);
  trace.push_back(norm);
  int growth = 0;
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    double umax = 0.0;
    for (double ui : u) umax = std::max(umax, std::abs(ui));
    const double target =
        std::max(1e-10, 16.0 * std::numeric_limits<double>::epsilon() * umax / (step * step));
    if (norm <= target) {
      converged = true;
      break;
    }
    // Tridiagonal Jacobian for interior unknowns 1..n-2 (Thomas algorithm).
    for (std::size_t i = 1; i + 1 < n; ++i) {
      sub[i] = 1.0 - c * hm_detail::rhs_du(grid(i - 1), u[i - 1]);
      diag[i] = -2.0 - 10.0 * c * hm_detail::rhs_du(grid(i), u[i]);
      sup[i] = 1.0 - c * hm_detail::rhs_du(grid(i + 1), u[i + 1]);
      delta[i] = -r[i];
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double m = sub[i] / diag[i - 1];
      diag[i] -= m * sup[i - 1];
      delta[i] -= m * delta[i - 1];
    }
    delta[n - 2] /= diag[n - 2];
    for (std::size_t i = n - 3; i >= 1; --i) {
      delta[i] = (delta[i] - sup[i] * delta[i + 1]) / diag[i];
    }
    delta[0] = delta[n - 1] = 0.0;

    // Damping by step halving until the residual decreases.
    double alpha = 1.0;
    double trial_norm = 0.0;
    for (int halving = 0; halving <= 10; ++halving) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * delta[i];
      trial_norm = hm_detail::residual_norm(x_left, step, trial, nullptr);
      if (trial_norm < norm) break;
      alpha *= 0.5;
    }
    growth = trial_norm >= norm ? growth + 1 : 0;
    u.swap(trial);
    norm = hm_detail::residual_norm(x_left, step, u, &r);
    trace.push_back(norm);
    if (growth >= 5) {
      throw divergence_error("solve_hm: Newton residual grew over 5 successive iterations",
                             trace);
    }
    if (growth > 0 && norm <= target * 4.0) {
      // Residual stagnated at the rounding floor.
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw convergence_error("solve_hm: Newton did not converge in 100 iterations");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(u[i] > 0.0)) {
      throw integrity_error("solve_hm: non-positive u at x = " + std::to_string(grid(i)) +
                            " (wrong branch)");
    }
  }
  std::vector<double> ux = hm_detail::derivative4(u, step);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid(i);
    v[i] = ux[i] * ux[i] - x * u[i] * u[i] - u[i] * u[i] * u[i] * u[i];
  }
  return HastingsMcLeodSolution(x_left, step, std::move(u), std::move(ux), std::move(v),
                                std::move(trace));
}

inline double v_at(const HastingsMcLeodSolution& sol, double x) { return sol.v_at(x); }

namespace hm_detail {

/// int_X^inf Ai^2 and int_X^inf y Ai^2, closed forms from Ai'' = y Ai.
inline std::array<double, 2> airy_tail_moments(double X) {
  const auto [ai, aip] = airy(X);
  const double m0 = aip * aip - X * ai * ai;
  const double m1 = (X * aip * aip - X * X * ai * ai - ai * aip) / 3.0;
  return {m0, m1};
}

}  // namespace hm_detail

/// Tracy-Widom exponent int_x^inf (y - x) u(y)^2 dy. Composite quadrature on
/// the grid (trapezoid with the h^2 endpoint correction) plus the Airy tail
/// beyond x_right.
inline double tw_integral(const HastingsMcLeodSolution& sol, double x) {
  if (!(x >= sol.x_left() + 1.0 && x <= sol.x_right() - 1.0)) {
    throw range_error("tw_integral: x = " + std::to_string(x) +
                      " outside [x_left + 1, x_right - 1]");
  }
  const double h = sol.step();
  const auto u = sol.u();
  const auto ux = sol.u_x();
  const std::size_t n = sol.size();
  auto k = static_cast<std::size_t>(std::ceil((x - sol.x_left()) / h - 1e-12));
  k = std::min(k, n - 1);
  const double yk = sol.grid_x(k);

  double total = 0.0;
  if (yk > x) {
    // Partial cell [x, y_k]: 5-point Gauss-Legendre on the interpolant.
    static constexpr std::array<double, 5> gx = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                 0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> gw = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};
    const double mid = 0.5 * (x + yk);
    const double rad = 0.5 * (yk - x);
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double y = mid + rad * gx[q];
      const double uy = sol.u_at(y);
      total += rad * gw[q] * (y - x) * uy * uy;
    }
  }
  auto f = [&](std::size_t i) { return (sol.grid_x(i) - x) * u[i] * u[i]; };
  auto fp = [&](std::size_t i) {
    return u[i] * u[i] + 2.0 * (sol.grid_x(i) - x) * u[i] * ux[i];
  };
  if (k + 1 < n) {
    double trap = 0.5 * (f(k) + f(n - 1));
    for (std::size_t i = k + 1; i + 1 < n; ++i) trap += f(i);
    total += h * trap - h * h / 12.0 * (fp(n - 1) - fp(k));
  }
  const auto [m0, m1] = hm_detail::airy_tail_moments(sol.x_right());
  total += m1 - x * m0;
  return std::max(total, 0.0);
}

}  // namespace gapdet

// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>

#include "gapdet/errors.hpp"

namespace gapdet {

using cplx = std::complex<double>;

template <std::size_t N>
using CVector = std::array<cplx, N>;

struct SegmentOptions {
  double rtol = 1e-12;
  double atol = 1e-24;
  double initial_step = 1e-3;  // as a fraction of the segment
  double min_step = 1e-14;     // as a fraction of the segment
  int max_steps = 2000000;
};

struct SegmentStats {
  int accepted = 0;
  int rejected = 0;
};

/// Integrates dy/dlambda = rhs(lambda, y) along the straight segment from `a`
/// to `b` in the complex plane using the Dormand-Prince 5(4) pair with local
/// extrapolation. Error control is componentwise relative (plus atol).
template <std::size_t N, class Rhs>
CVector<N> integrate_segment(const Rhs& rhs, CVector<N> y, cplx a, cplx b,
                             const SegmentOptions& opt = {}, SegmentStats* stats = nullptr) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const cplx span = b - a;
  if (span == cplx(0.0)) return y;
  // Parameterize lambda = a + span * tau, tau in [0, 1].
  auto f = [&](double tau, const CVector<N>& state) {
    CVector<N> d = rhs(a + span * tau, state);
    for (auto& di : d) di *= span;
    return d;
  };

  double tau = 0.0;
  double h = opt.initial_step;
  CVector<N> k1 = f(tau, y);
  CVector<N> tmp, k2, k3, k4, k5, k6, k7, ynew;
  int steps = 0;
  while (tau < 1.0) {
    if (++steps > opt.max_steps) {
      std::ostringstream msg;
      msg << "integrate_segment: step budget exhausted at lambda = " << (a + span * tau);
      const cplx p = a + span * tau;
      throw stiffness_error(msg.str(), p.real(), p.imag());
    }
    h = std::min(h, 1.0 - tau);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a21 * k1[i]);
    k2 = f(tau + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(tau + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(tau + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(tau + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(tau + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = f(tau + h, ynew);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
      const double scale = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (err <= 1.0) {
      tau = (h >= 1.0 - tau) ? 1.0 : tau + h;
      y = ynew;
      k1 = k7;  // first-same-as-last
      if (stats) ++stats->accepted;
      h *= err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    } else {
      if (stats) ++stats->rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < opt.min_step) {
        const cplx p = a + span * tau;
        std::ostringstream msg;
        msg << "integrate_segment: step size underflow at lambda = " << p;
        throw stiffness_error(msg.str(), p.real(), p.imag());
      }
    }
  }
  return y;
}

}  // namespace gapdet

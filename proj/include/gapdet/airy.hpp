// SPDX-License-Identifier: MIT
//
// Airy function Ai and its derivative on [-10, 40].
//
// For x <= 7 the Maclaurin series Ai = c1 f(x) - c2 g(x) is summed in
// double-double; at x = 7 the two branches cancel by about twelve digits, which
// the ~31 digit accumulation absorbs. For x > 7 the exponentially scaled
// asymptotic series is summed up to its smallest term.
#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "gapdet/errors.hpp"
#include "gapdet/extended_real.hpp"

namespace gapdet {

struct AiryPair {
  double ai;
  double ai_prime;
};

namespace airy_detail {

inline constexpr double series_limit = 7.0;

inline const ExtendedReal& ai0() {
  static const ExtendedReal v =
      ExtendedReal::parse("0.35502805388781723926006318600418317639797917419918");
  return v;
}

// -Ai'(0)
inline const ExtendedReal& minus_ai0_prime() {
  static const ExtendedReal v =
      ExtendedReal::parse("0.25881940379280679840518356018920396347909113835493");
  return v;
}

inline void check_domain(double x) {
  if (!(x >= -10.0 && x <= 40.0)) {
    throw range_error("airy: argument " + std::to_string(x) + " outside [-10, 40]");
  }
}

inline AiryPair maclaurin(double x) {
  const ExtendedReal xx(x);
  const ExtendedReal x3 = xx * xx * xx;
  // f = sum a_k x^{3k},  g = sum c_k x^{3k+1}, and their derivatives.
  ExtendedReal f_term(1.0), f(1.0);
  ExtendedReal g_term(xx), g(xx);
  ExtendedReal fp_term = xx * xx / 2.0, fp = fp_term;
  ExtendedReal gp_term(1.0), gp(1.0);
  for (int k = 1; k < 200; ++k) {
    const double k3 = 3.0 * k;
    f_term = f_term * x3 / ((k3 - 1.0) * k3);
    g_term = g_term * x3 / (k3 * (k3 + 1.0));
    gp_term = gp_term * x3 / (k3 * (k3 - 2.0));
    if (k >= 2) fp_term = fp_term * x3 / ((k3 - 3.0) * (k3 - 1.0));
    f += f_term;
    g += g_term;
    gp += gp_term;
    if (k >= 2) fp += fp_term;
    const double tiny = 1e-34;
    if (std::abs(f_term.hi()) < tiny * std::abs(f.hi()) &&
        std::abs(g_term.hi()) < tiny * std::abs(g.hi()) && k > 3) {
      break;
    }
  }
  const ExtendedReal ai = ai0() * f - minus_ai0_prime() * g;
  const ExtendedReal aip = ai0() * fp - minus_ai0_prime() * gp;
  return {ai.to_double(), aip.to_double()};
}

inline AiryPair asymptotic(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double x14 = std::sqrt(std::sqrt(x));
  const double scale = std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi));
  double u = 1.0;
  double sum_ai = 1.0;
  double sum_aip = 1.0;
  double zpow = 1.0;
  double last_ai = 1.0;
  double last_aip = 1.0;
  bool ai_done = false;
  bool aip_done = false;
  for (int k = 1; k < 80 && !(ai_done && aip_done); ++k) {
    u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
    zpow *= zeta;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double t_ai = sign * u / zpow;
    const double t_aip = -sign * (6.0 * k + 1.0) / (6.0 * k - 1.0) * u / zpow;
    if (!ai_done) {
      if (std::abs(t_ai) >= std::abs(last_ai)) {
        ai_done = true;
      } else {
        sum_ai += t_ai;
        last_ai = t_ai;
      }
    }
    if (!aip_done) {
      if (std::abs(t_aip) >= std::abs(last_aip)) {
        aip_done = true;
      } else {
        sum_aip += t_aip;
        last_aip = t_aip;
      }
    }
  }
  return {scale / x14 * sum_ai, -scale * x14 * sum_aip};
}

}  // namespace airy_detail

inline AiryPair airy(double x) {
  airy_detail::check_domain(x);
  return x <= airy_detail::series_limit ? airy_detail::maclaurin(x) : airy_detail::asymptotic(x);
}

inline double airy_ai(double x) { return airy(x).ai; }
inline double airy_ai_prime(double x) { return airy(x).ai_prime; }

}  // namespace gapdet

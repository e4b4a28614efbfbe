// SPDX-License-Identifier: MIT
//
// Closed-form large-gap predictions and the power-law exponent fit.
//   A(s, x) = -(2/3) s^6 - s^4 x - (sx)^2 / 2 - (3/4) ln s
#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gapdet/constants.hpp"
#include "gapdet/errors.hpp"
#include "gapdet/hastings_mcleod.hpp"

namespace gapdet {

enum class Formula { theorem1, theorem2, dyson_sine, logsasy, logxasy };

inline std::string formula_name(Formula f) {
  switch (f) {
    case Formula::theorem1: return "theorem1";
    case Formula::theorem2: return "theorem2";
    case Formula::dyson_sine: return "dyson";
    case Formula::logsasy: return "logsasy";
    case Formula::logxasy: return "logxasy";
  }
  return "unknown";
}

/// value = leading + constant + tw_term.
struct AsymptoticPrediction {
  double value = 0.0;
  double leading = 0.0;
  double constant = 0.0;
  double tw_term = 0.0;
  Formula formula = Formula::theorem2;
};

namespace asympt_detail {

inline void require_positive_s(double s, const char* who) {
  if (!(s > 0.0)) throw range_error(std::string(who) + ": requires s > 0");
}

inline AsymptoticPrediction compose(double leading, double constant, double tw, Formula f) {
  const ExtendedReal sum = ExtendedReal(leading) + constant + tw;
  return {sum.to_double(), leading, constant, tw, f};
}

}  // namespace asympt_detail

inline double leading_term(double s, double x) {
  const double s2 = s * s;
  const double s4 = s2 * s2;
  return -2.0 / 3.0 * s4 * s2 - s4 * x - 0.5 * (s * x) * (s * x) - 0.75 * std::log(s);
}

inline AsymptoticPrediction theorem2_prediction(double s, double x) {
  asympt_detail::require_positive_s(s, "theorem2_prediction");
  return asympt_detail::compose(leading_term(s, x), constants().omega0.to_double(), 0.0,
                                Formula::theorem2);
}

inline AsymptoticPrediction theorem1_prediction(double s, double x,
                                                const HastingsMcLeodSolution& sol) {
  asympt_detail::require_positive_s(s, "theorem1_prediction");
  return asympt_detail::compose(leading_term(s, x), constants().omega0.to_double(),
                                tw_integral(sol, x), Formula::theorem1);
}

inline AsymptoticPrediction dyson_sine_prediction(double s, double x) {
  const double sx = s * x;
  if (!(sx > 0.0)) throw range_error("dyson_sine_prediction: requires s x > 0");
  return asympt_detail::compose(-0.5 * sx * sx - 0.25 * std::log(sx),
                                constants().dyson_const.to_double(), 0.0, Formula::dyson_sine);
}

inline double logsasy_prediction(double s, double x) {
  asympt_detail::require_positive_s(s, "logsasy_prediction");
  const double s2 = s * s;
  return -4.0 * s2 * s2 * s - 4.0 * x * s2 * s - x * x * s - 3.0 / (4.0 * s);
}

inline double logxasy_prediction(double s, double x, double v) {
  asympt_detail::require_positive_s(s, "logxasy_prediction");
  const double s2 = s * s;
  return -s2 * s2 - s2 * x - v - 1.0 / (8.0 * s2);
}

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;  // -log det ~ prefactor * s^exponent
};

/// Least-squares slope of log(-log_det) against log s.
inline PowerLawFit fcet_fit(const std::vector<std::pair<double, double>>& samples) {
  std::set<double> distinct;
  for (const auto& [s, ld] : samples) {
    if (!(s >= 1.4)) throw range_error("fcet_fit: sample s = " + std::to_string(s) + " < 1.4");
    if (!(ld < 0.0)) throw range_error("fcet_fit: log det samples must be negative");
    distinct.insert(s);
  }
  if (distinct.size() < 4) {
    throw std::invalid_argument("fcet_fit: needs at least 4 samples with distinct s, got " +
                                std::to_string(distinct.size()));
  }
  const double n = static_cast<double>(samples.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [s, ld] : samples) {
    mx += std::log(s);
    my += std::log(-ld);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [s, ld] : samples) {
    const double dx = std::log(s) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(-ld) - my);
  }
  const double slope = sxy / sxx;
  return {slope, std::exp(my - slope * mx)};
}

}  // namespace gapdet

// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "gapdet/gapdet.hpp"

using namespace gapdet;

namespace {

constexpr double pi = std::numbers::pi;

// Nystrom determinant on Boost's tabulated Gauss rule with a long double LU.
template <unsigned N>
double oracle_log_det(const KernelSpec& spec, double s) {
  using rule = boost::math::quadrature::gauss<long double, N>;
  std::vector<long double> x, w;
  const auto& ab = rule::abscissa();
  const auto& wt = rule::weights();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i] == 0.0L) {
      x.push_back(0.0L);
      w.push_back(wt[i]);
      continue;
    }
    x.push_back(ab[i]);
    w.push_back(wt[i]);
    x.push_back(-ab[i]);
    w.push_back(wt[i]);
  }
  const std::size_t n = x.size();
  std::vector<long double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double xi = static_cast<double>(s * x[i]), xj = static_cast<double>(s * x[j]);
      const long double k = i == j ? kernel_diag(spec, xi) : kernel_eval(spec, xi, xj);
      m[i * n + j] = (i == j ? 1.0L : 0.0L) - s * std::sqrt(w[i] * w[j]) * k;
    }
  }
  long double acc = 0.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r * n + c]) > std::abs(m[p * n + c])) p = r;
    if (p != c)
      for (std::size_t k = 0; k < n; ++k) std::swap(m[c * n + k], m[p * n + k]);
    acc += std::log(std::abs(m[c * n + c]));
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = m[r * n + c] / m[c * n + c];
      for (std::size_t k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
    }
  }
  return static_cast<double>(acc);
}

// -sum_k tr(A^k) / k for the sine kernel on (-s, s), A the weighted matrix on
// Boost's 20-point rule; a power-series route that bypasses LU.
double sine_trace_series(double x, double s) {
  using rule = boost::math::quadrature::gauss<long double, 20>;
  std::vector<long double> p, w;
  for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
    p.push_back(s * rule::abscissa()[i]);
    w.push_back(s * rule::weights()[i]);
    p.push_back(-s * rule::abscissa()[i]);
    w.push_back(s * rule::weights()[i]);
  }
  const std::size_t n = p.size();
  std::vector<long double> a(n * n), pow_a(n * n), next(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const long double d = p[i] - p[j];
      const long double k = d == 0.0L ? x / std::numbers::pi_v<long double>
                                      : std::sin(x * d) / (std::numbers::pi_v<long double> * d);
      a[i * n + j] = pow_a[i * n + j] = std::sqrt(w[i] * w[j]) * k;
    }
  }
  long double sum = 0.0L;
  for (int k = 1; k <= 12; ++k) {
    long double tr = 0.0L;
    for (std::size_t i = 0; i < n; ++i) tr += pow_a[i * n + i];
    sum -= tr / k;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        long double acc = 0.0L;
        for (std::size_t l = 0; l < n; ++l) acc += pow_a[i * n + l] * a[l * n + j];
        next[i * n + j] = acc;
      }
    pow_a.swap(next);
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST(LogDet, EmptyIntervalIsZero) {
  for (const KernelSpec& k : {KernelSpec{SineKernel{1.0}}, KernelSpec{CubicSineKernel{1.0, 0.0}},
                              painleve_kernel(0.0)}) {
    const DetEvaluation e = log_det(k, 0.0, 16);
    EXPECT_EQ(e.log_det.hi(), 0.0);
    EXPECT_EQ(e.log_det.lo(), 0.0);
  }
  const DetEvaluation c = log_det_converged(SineKernel{1.0}, 0.0);
  EXPECT_EQ(c.log_det.to_double(), 0.0);
  EXPECT_EQ(c.n, 32);
  EXPECT_TRUE(c.converged);
}

TEST(LogDet, SmallIntervalTraceExpansion) {
  const double s = 0.01;
  const DetEvaluation e = log_det(SineKernel{1.0}, s, 32);
  // To O(s^4) the kernel is the constant x/pi, a rank-one operator.
  EXPECT_NEAR(e.log_det.to_double(), std::log1p(-2.0 * s / pi), 1e-6);
  EXPECT_NEAR(e.log_det.to_double(), -2.0 * s / pi, 3e-5);
  EXPECT_NEAR(e.log_det.to_double(), sine_trace_series(1.0, s), 1e-14);
  EXPECT_NEAR(log_det(SineKernel{2.0}, 0.05, 32).log_det.to_double(), sine_trace_series(2.0, 0.05),
              1e-14);
}

TEST(LogDet, AgreesWithIndependentNystrom) {
  EXPECT_NEAR(log_det(SineKernel{1.0}, 2.0, 64).log_det.to_double(),
              oracle_log_det<30>(SineKernel{1.0}, 2.0), 1e-12);
  EXPECT_NEAR(log_det(CubicSineKernel{1.0, 1.0}, 1.0, 64).log_det.to_double(),
              oracle_log_det<30>(CubicSineKernel{1.0, 1.0}, 1.0), 1e-11);
  EXPECT_NEAR(log_det(CubicSineKernel{0.5, -1.0}, 1.2, 64).log_det.to_double(),
              oracle_log_det<30>(CubicSineKernel{0.5, -1.0}, 1.2), 1e-11);
  EXPECT_NEAR(log_det(painleve_kernel(0.0), 1.0, 64).log_det.to_double(),
              oracle_log_det<30>(painleve_kernel(0.0), 1.0), 1e-9);
}

TEST(LogDet, SineAgainstLargeGapFormula) {
  const DetEvaluation e = log_det(SineKernel{1.0}, 6.0, 200);
  EXPECT_NEAR(e.log_det.to_double(), -18.88644, 0.2);
  EXPECT_NEAR(e.log_det.to_double(), dyson_sine_prediction(6.0, 1.0).value, 0.2);
}

TEST(LogDet, ZeroCubicTermMatchesSineBitwise) {
  for (double s : {0.5, 2.0, 5.0}) {
    const DetEvaluation a = log_det(SineKernel{1.3}, s, 48);
    const DetEvaluation b = log_det(CubicSineKernel{0.0, 1.3}, s, 48);
    EXPECT_EQ(a.log_det.hi(), b.log_det.hi());
    EXPECT_EQ(a.log_det.lo(), b.log_det.lo());
  }
}

TEST(LogDet, NonpositiveAndDecreasingInS) {
  for (const KernelSpec& k : {KernelSpec{SineKernel{1.0}}, KernelSpec{CubicSineKernel{1.0, 1.0}},
                              painleve_kernel(-1.0), painleve_kernel(1.0)}) {
    double prev = 0.0;
    for (double s : {0.5, 1.0, 1.5, 2.0}) {
      const double v = log_det_converged(k, s).log_det.to_double();
      EXPECT_LE(v, 0.0);
      EXPECT_LT(v, prev) << kernel_name(k) << " " << s;
      prev = v;
    }
  }
}

TEST(LogDet, SpectralConvergence) {
  for (const KernelSpec& k : {KernelSpec{SineKernel{1.0}}, KernelSpec{CubicSineKernel{1.0, 1.0}}}) {
    const double a = log_det(k, 1.0, 8).log_det.to_double();
    const double b = log_det(k, 1.0, 12).log_det.to_double();
    const double c = log_det(k, 1.0, 16).log_det.to_double();
    const double d = log_det(k, 1.0, 64).log_det.to_double();
    EXPECT_LE(std::abs(b - d), 1e-2 * std::abs(a - d)) << kernel_name(k);
    EXPECT_LE(std::abs(c - d), 1e-2 * std::abs(b - d)) << kernel_name(k);
  }
  const double p = log_det(CubicSineKernel{1.0, 1.0}, 1.0, 64).log_det.to_double();
  const double q = log_det(CubicSineKernel{1.0, 1.0}, 1.0, 128).log_det.to_double();
  EXPECT_LE(std::abs(p - q), 1e-10);
}

TEST(LogDetConverged, SelfConvergenceOnReachableRange) {
  for (const KernelSpec& k : {KernelSpec{SineKernel{1.0}}, KernelSpec{CubicSineKernel{1.0, 0.0}},
                              painleve_kernel(0.0)}) {
    for (double s : {0.5, 1.0, 1.5, 2.0}) {
      const DetEvaluation e = log_det_converged(k, s);
      EXPECT_TRUE(e.converged) << kernel_name(k) << " " << s;
      const double half = log_det(k, s, e.n / 2).log_det.to_double();
      EXPECT_LE(std::abs(e.log_det.to_double() - half), 1e-8) << kernel_name(k) << " " << s;
    }
  }
  const DetEvaluation p = log_det_converged(painleve_kernel(0.0), 1.0);
  EXPECT_TRUE(p.converged);
  EXPECT_LE(p.n, 200);
}

TEST(LogDetConverged, SingleOrderIsNotMarkedConverged) {
  EXPECT_FALSE(log_det(SineKernel{1.0}, 1.0, 64).converged);
  const DetEvaluation e = log_det(CubicSineKernel{1.0, 1.0}, 1.0, 64);
  EXPECT_GT(e.pivot_min.to_double(), 0.0);
  EXPECT_LE(e.pivot_min.to_double(), 1.0);
  EXPECT_EQ(e.n, 64);
  EXPECT_EQ(e.s, 1.0);
}

TEST(KernelMatrix, SymmetricWithWeightedDiagonal) {
  const int n = 24;
  const auto a = kernel_matrix(painleve_kernel(0.5), 1.2, n);
  const auto rule = gauss_legendre_cached(n);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) EXPECT_EQ(a(i, j), a(j, i));
    const double xi = 1.2 * rule->nodes[i].to_double();
    EXPECT_NEAR(a(i, i), 1.2 * rule->weights[i].to_double() * kernel_diag(painleve_kernel(0.5), xi),
                1e-15);
  }
}

TEST(KernelMatrix, IndependentOfWorkerCount) {
  const char* old = std::getenv("GAPDET_THREADS");
  const std::string saved = old ? old : "";
  setenv("GAPDET_THREADS", "1", 1);
  const double one = log_det(painleve_kernel(-0.5), 1.5, 48).log_det.to_double();
  setenv("GAPDET_THREADS", "4", 1);
  const double four = log_det(painleve_kernel(-0.5), 1.5, 48).log_det.to_double();
  if (old) setenv("GAPDET_THREADS", saved.c_str(), 1); else unsetenv("GAPDET_THREADS");
  EXPECT_EQ(one, four);
}

TEST(LogDet, DomainAndIntegrityErrors) {
  EXPECT_THROW(log_det(CubicSineKernel{1.0, 0.0}, 2.5, 32), range_error);
  EXPECT_THROW(log_det(painleve_kernel(0.0), -0.1, 32), range_error);
  EXPECT_THROW(log_det(SineKernel{1.0}, 1.0, 7), range_error);
  EXPECT_THROW(log_det(SineKernel{1.0}, 1.0, 401), range_error);
  EXPECT_THROW(log_det(SineKernel{2.0}, 8.5, 32), range_error);
  EXPECT_NO_THROW(log_det(SineKernel{1.0}, 3.0, 32));
  // A negative x makes the sine kernel negative definite: det(I - K) > 1.
  EXPECT_THROW(log_det(SineKernel{-1.0}, 1.0, 32), integrity_error);
}

TEST(Derivatives, SmallIntervalInS) {
  // Derivatives of log(1 - 2 s x / pi).
  for (double x : {1.0, 3.0}) {
    const double r = 1.0 - 2.0 * 0.01 * x / pi;
    EXPECT_NEAR(dlogdet_ds(SineKernel{x}, 0.01, 1e-3), -2.0 * x / pi / r, 5e-5) << x;
    EXPECT_NEAR(dlogdet_dx(SineKernel{x}, 0.01, 1e-3), -2.0 * 0.01 / pi / r, 1e-6) << x;
  }
  EXPECT_NEAR(dlogdet_ds(SineKernel{1.0}, 0.01, 1e-3), -2.0 / pi, 5e-3);
  EXPECT_NEAR(dlogdet_dx(SineKernel{1.0}, 0.01, 1e-3), -2.0 * 0.01 / pi, 1e-4);
}

TEST(Derivatives, StepHalving) {
  for (const KernelSpec& k : {KernelSpec{CubicSineKernel{1.0, 1.0}}, painleve_kernel(0.0)}) {
    const double a = dlogdet_ds(k, 1.5, 1e-3);
    const double b = dlogdet_ds(k, 1.5, 5e-4);
    EXPECT_NEAR(a, b, 1e-4) << kernel_name(k);
  }
  const double a = dlogdet_dx(CubicSineKernel{1.0, 1.0}, 1.0, 1e-3);
  const double b = dlogdet_dx(CubicSineKernel{1.0, 1.0}, 1.0, 5e-4);
  EXPECT_NEAR(a, b, 1e-4);
}

TEST(Derivatives, LargeGapExpansions) {
  EXPECT_NEAR(dlogdet_ds(painleve_kernel(1.0), 2.0, 1e-3), -162.375, 0.5);
  const double v0 = default_hm_solution()->v_at(0.0);
  EXPECT_NEAR(dlogdet_dx(painleve_kernel(0.0), 2.0, 1e-3), -16.0 - v0 - 1.0 / 32.0, 0.5);
}

TEST(Derivatives, ZeroCubicTermMatchesSine) {
  EXPECT_EQ(dlogdet_dx(SineKernel{1.0}, 0.7, 1e-3), dlogdet_dx(CubicSineKernel{0.0, 1.0}, 0.7, 1e-3));
  EXPECT_EQ(dlogdet_ds(SineKernel{1.0}, 0.7, 1e-3), dlogdet_ds(CubicSineKernel{0.0, 1.0}, 0.7, 1e-3));
}

TEST(Derivatives, DomainErrors) {
  EXPECT_THROW(dlogdet_ds(SineKernel{1.0}, 1.0, 2e-3), range_error);
  EXPECT_THROW(dlogdet_ds(SineKernel{1.0}, 1e-4, 1e-3), range_error);
  EXPECT_THROW(dlogdet_dx(SineKernel{1.0}, 1.0, 0.0), range_error);
  EXPECT_THROW(dlogdet_dx(SineKernel{1.0}, 0.0, 1e-3), range_error);
}

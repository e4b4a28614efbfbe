// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "gapdet/extended_real.hpp"
#include "gapdet/log_det.hpp"
#include "gapdet/quadrature.hpp"

using namespace gapdet;
using Big = boost::multiprecision::cpp_bin_float_100;

namespace {

Big big(const ExtendedReal& a) { return Big(a.hi()) + Big(a.lo()); }

double rel_err(const ExtendedReal& got, const Big& want) {
  return static_cast<double>(abs((big(got) - want) / want));
}

ExtendedReal random_dd(std::mt19937_64& rng, double lo_exp, double hi_exp) {
  std::uniform_real_distribution<double> mant(1.0, 2.0), ex(lo_exp, hi_exp), sign(-1.0, 1.0);
  const double hi = std::copysign(mant(rng) * std::pow(2.0, std::floor(ex(rng))), sign(rng));
  const double lo = hi * 0x1p-54 * sign(rng);
  return ExtendedReal::from_pair(hi, lo);
}

bool normalized(const ExtendedReal& a) {
  if (a.hi() == 0.0) return a.lo() == 0.0;
  const double ulp = std::nextafter(std::abs(a.hi()), INFINITY) - std::abs(a.hi());
  return std::abs(a.lo()) <= ulp / 2.0;
}

}  // namespace

TEST(ErrorFreeTransforms, TwoSumIsExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), e(-40.0, 40.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng) * std::pow(2.0, e(rng));
    const double b = u(rng) * std::pow(2.0, e(rng));
    const auto r = eft::two_sum(a, b);
    EXPECT_EQ(Big(r.s) + Big(r.e), Big(a) + Big(b));
    EXPECT_EQ(r.s, a + b);
  }
}

TEST(ErrorFreeTransforms, TwoProdIsExactBothVariants) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0), e(-200.0, 200.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng) * std::pow(2.0, e(rng));
    const double b = u(rng) * std::pow(2.0, e(rng));
    const Big exact = Big(a) * Big(b);
    const auto d = eft::two_prod_dekker(a, b);
    const auto f = eft::two_prod_fma(a, b);
    EXPECT_EQ(Big(d.s) + Big(d.e), exact);
    EXPECT_EQ(Big(f.s) + Big(f.e), exact);
  }
}

TEST(ExtendedReal, ArithmeticAgainstMultiprecision) {
  std::mt19937_64 rng(13);
  double worst_add = 0, worst_mul = 0, worst_div = 0;
  for (int i = 0; i < 5000; ++i) {
    const ExtendedReal a = random_dd(rng, -30, 30);
    const ExtendedReal b = random_dd(rng, -30, 30);
    const Big ba = big(a), bb = big(b);
    const ExtendedReal s = a + b, p = a * b, q = a / b;
    EXPECT_TRUE(normalized(s) && normalized(p) && normalized(q));
    // Addition error is relative to the operands: cancellation is exact in
    // the leading parts but the trailing parts carry their own rounding.
    const Big scale = abs(ba) > abs(bb) ? Big(abs(ba)) : Big(abs(bb));
    worst_add = std::max(worst_add, static_cast<double>(abs(big(s) - (ba + bb)) / scale));
    worst_mul = std::max(worst_mul, rel_err(p, ba * bb));
    worst_div = std::max(worst_div, rel_err(q, ba / bb));
  }
  EXPECT_LE(worst_add, 4e-32);
  EXPECT_LE(worst_mul, 1e-31);
  EXPECT_LE(worst_div, 2e-31);
}

TEST(ExtendedReal, AddSubtractRoundTrip) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> ratio(-10.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const ExtendedReal a = random_dd(rng, -5, 5);
    const ExtendedReal b = a * std::pow(10.0, ratio(rng));
    EXPECT_EQ((a + ExtendedReal(0.0)) - ExtendedReal(0.0), a);
    const ExtendedReal back = (a + b) - b;
    // Two roundings of size |a + b| u^2 each bound the deviation.
    const double bound = 2e-31 * std::max(std::abs(a.hi()), std::abs(b.hi()));
    EXPECT_LE(std::abs((back - a).to_double()), bound);
    // Binary64 operands are recovered exactly.
    const double x = a.hi(), y = b.hi();
    EXPECT_EQ((ExtendedReal(x) + y) - y, ExtendedReal(x));
  }
}

TEST(ExtendedReal, ElementaryFunctions) {
  for (double x : {-40.0, -3.3, -0.7, -1e-5, 0.0, 1e-9, 0.5, 1.0, 2.75, 17.0, 123.4}) {
    const ExtendedReal a = ExtendedReal::from_pair(x, x * 1e-17);
    EXPECT_LE(rel_err(exp(a), boost::multiprecision::exp(big(a))), 1e-30) << x;
  }
  for (double x : {1e-30, 1e-5, 0.3, 0.999, 1.0 + 1e-12, 2.0, 1e5, 3e200}) {
    const ExtendedReal a = ExtendedReal::from_pair(x, x * 3e-18);
    const Big want = boost::multiprecision::log(big(a));
    const double scale = std::max(1.0, std::abs(static_cast<double>(want)));
    EXPECT_LE(static_cast<double>(abs(big(log(a)) - want)), 3e-31 * scale) << x;
    EXPECT_LE(rel_err(sqrt(a), boost::multiprecision::sqrt(big(a))), 2e-31) << x;
  }
  EXPECT_EQ(log(ExtendedReal(1.0)).to_double(), 0.0);
  EXPECT_TRUE(std::isnan(sqrt(ExtendedReal(-1.0)).hi()));
}

TEST(ExtendedReal, ParseAndRender) {
  const char* text = "-0.16542114370045092921391966024278064276403638";
  const ExtendedReal z = ExtendedReal::parse(text);
  EXPECT_LE(rel_err(z, Big(text)), 2e-31);
  EXPECT_EQ(z.to_string(20).substr(0, 22), "-1.6542114370045092921");
  EXPECT_LE(rel_err(ExtendedReal::parse("6.02214076e23"), Big("6.02214076e23")), 2e-31);
  EXPECT_LE(rel_err(ExtendedReal::parse("1.5e-7"), Big("1.5e-7")), 2e-31);
  EXPECT_THROW(ExtendedReal::parse("1.2.3"), std::invalid_argument);
  EXPECT_THROW(ExtendedReal::parse("abc"), std::invalid_argument);
  const ExtendedReal third = ExtendedReal(1.0) / 3.0;
  EXPECT_LE(rel_err(ExtendedReal::parse(third.to_string(33)), big(third)), 2e-31);
}

TEST(GaussLegendre, SmallOrders) {
  const auto r1 = gauss_legendre(1);
  ASSERT_EQ(r1.nodes.size(), 1u);
  EXPECT_EQ(r1.nodes[0].to_double(), 0.0);
  EXPECT_EQ(r1.weights[0].to_double(), 2.0);
  const auto r2 = gauss_legendre(2);
  const Big root = 1 / boost::multiprecision::sqrt(Big(3));
  EXPECT_LE(rel_err(r2.nodes[1], root), 1e-31);
  EXPECT_LE(rel_err(-r2.nodes[0], root), 1e-31);
  EXPECT_LE(rel_err(r2.weights[0], Big(1)), 1e-31);
  EXPECT_LE(rel_err(r2.weights[1], Big(1)), 1e-31);
}

TEST(GaussLegendre, OrderFortyMomentsAndWeights) {
  const auto r = gauss_legendre(40);
  ExtendedReal wsum(0.0), moment(0.0);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    wsum += r.weights[i];
    ExtendedReal p(1.0);
    for (int k = 0; k < 78; ++k) p *= r.nodes[i];
    moment += r.weights[i] * p;
  }
  EXPECT_LE(std::abs((wsum - 2.0).to_double()), 1e-28);
  EXPECT_LE(static_cast<double>(abs(big(moment) - Big(2) / 79)), 1e-26);
}

TEST(GaussLegendre, StructuralInvariants) {
  for (int n : {3, 8, 17, 64, 128, 400}) {
    const auto r = gauss_legendre(n);
    ASSERT_EQ(static_cast<int>(r.nodes.size()), n);
    ExtendedReal wsum(0.0);
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const auto m = static_cast<std::size_t>(n - 1 - i);
      EXPECT_GT(r.weights[k].to_double(), 0.0);
      EXPECT_GT(r.nodes[k].to_double(), -1.0);
      EXPECT_LT(r.nodes[k].to_double(), 1.0);
      if (i > 0) EXPECT_LT(r.nodes[k - 1], r.nodes[k]);
      EXPECT_EQ(r.nodes[k], -r.nodes[m]);
      EXPECT_EQ(r.weights[k], r.weights[m]);
      wsum += r.weights[k];
    }
    EXPECT_LE(std::abs((wsum - 2.0).to_double()), 1e-28) << n;
  }
}

TEST(GaussLegendre, ExactForAllDegreesBelowTwoN) {
  for (int n : {5, 12, 23}) {
    const auto r = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      ExtendedReal q(0.0);
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        ExtendedReal p(1.0);
        for (int j = 0; j < k; ++j) p *= r.nodes[i];
        q += r.weights[i] * p;
      }
      const Big want = k % 2 ? Big(0) : Big(2) / (k + 1);
      EXPECT_LE(static_cast<double>(abs(big(q) - want)), 1e-26) << "n=" << n << " k=" << k;
    }
  }
}

TEST(GaussLegendre, MatchesIndependentRuleAndIntegratesExp) {
  using boost::math::quadrature::gauss;
  const auto r = gauss_legendre(20);
  const auto& abscissa = gauss<Big, 20>::abscissa();
  for (std::size_t j = 0; j < abscissa.size(); ++j) {
    const Big x = abscissa[j];
    if (x == 0) continue;
    // Boost lists the nonnegative half in increasing order.
    EXPECT_LE(static_cast<double>(abs(big(r.nodes[10 + j]) - x)), 1e-30);
  }
  ExtendedReal q(0.0);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) q += r.weights[i] * exp(r.nodes[i]);
  const Big want = boost::multiprecision::exp(Big(1)) - boost::multiprecision::exp(Big(-1));
  EXPECT_LE(static_cast<double>(abs(big(q) - want)), 1e-25);
}

TEST(GaussLegendre, DomainAndCache) {
  EXPECT_THROW(gauss_legendre(0), range_error);
  EXPECT_THROW(gauss_legendre(2001), range_error);
  const auto a = gauss_legendre_cached(32);
  const auto b = gauss_legendre_cached(32);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(a->nodes, gauss_legendre(32).nodes);
}

TEST(LogDetLU, TrivialMatrices) {
  const auto id = log_det_lu(SquareMatrix<ExtendedReal>::identity(5));
  EXPECT_EQ(id.log_abs_det.to_double(), 0.0);
  EXPECT_EQ(id.sign, 1);
  SquareMatrix<ExtendedReal> d(2, ExtendedReal(0.0));
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  const auto r = log_det_lu(d);
  EXPECT_LE(rel_err(r.log_abs_det, boost::multiprecision::log(Big(6))), 1e-31);
  EXPECT_EQ(r.sign, 1);
  SquareMatrix<ExtendedReal> one(1, ExtendedReal(-0.25));
  const auto o = log_det_lu(one);
  EXPECT_EQ(o.sign, -1);
  EXPECT_EQ(o.log_abs_det, log(ExtendedReal(0.25)));
}

TEST(LogDetLU, HilbertSixAgainstRationalElimination) {
  using Rational = boost::rational<boost::multiprecision::cpp_int>;
  constexpr int n = 6;
  std::vector<std::vector<Rational>> h(n, std::vector<Rational>(n));
  SquareMatrix<ExtendedReal> m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      h[i][j] = Rational(1, i + j + 1);
      m(i, j) = ExtendedReal(1.0) / static_cast<double>(i + j + 1);
    }
  }
  Rational det = 1;
  for (int k = 0; k < n; ++k) {
    det *= h[k][k];
    for (int i = k + 1; i < n; ++i) {
      const Rational f = h[i][k] / h[k][k];
      for (int j = k; j < n; ++j) h[i][j] -= f * h[k][j];
    }
  }
  const Big exact = Big(det.numerator()) / Big(det.denominator());
  EXPECT_NEAR(static_cast<double>(exact), 5.3673e-18, 1e-21);
  const auto r = log_det_lu(m);
  EXPECT_EQ(r.sign, 1);
  EXPECT_LE(rel_err(r.log_abs_det, boost::multiprecision::log(exact)), 1e-20);
  EXPECT_GT(r.pivot_min.to_double(), 0.0);
}

TEST(LogDetLU, PermutationInvariance) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  constexpr std::size_t n = 12;
  SquareMatrix<ExtendedReal> a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = g(rng);
  const auto base = log_det_lu(a);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    // Parity of the permutation from its cycle decomposition.
    int parity = 1;
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[i]) continue;
      std::size_t len = 0;
      for (std::size_t j = i; !seen[j]; j = p[j]) {
        seen[j] = true;
        ++len;
      }
      if (len % 2 == 0) parity = -parity;
    }
    SquareMatrix<ExtendedReal> b(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) = a(p[i], p[j]);
    const auto r = log_det_lu(b);
    EXPECT_NEAR(r.log_abs_det.to_double(), base.log_abs_det.to_double(), 1e-28);
    EXPECT_EQ(r.sign, base.sign);
    SquareMatrix<ExtendedReal> rows(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) rows(i, j) = a(p[i], j);
    EXPECT_EQ(log_det_lu(rows).sign, base.sign * parity);
  }
}

TEST(LogDetLU, Errors) {
  SquareMatrix<ExtendedReal> s(3, ExtendedReal(1.0));
  try {
    log_det_lu(s);
    FAIL() << "expected singular_matrix_error";
  } catch (const singular_matrix_error& e) {
    EXPECT_EQ(e.step(), 1u);
  }
  SquareMatrix<ExtendedReal> bad = SquareMatrix<ExtendedReal>::identity(2);
  bad(0, 1) = ExtendedReal(std::nan(""));
  EXPECT_THROW(log_det_lu(bad), std::invalid_argument);
  SquareMatrix<double> dbl = SquareMatrix<double>::identity(3);
  dbl(2, 2) = 4.0;
  EXPECT_NEAR(log_det_lu(dbl).log_abs_det, std::log(4.0), 1e-15);
}

// SPDX-License-Identifier: MIT
//
// First column of the Painleve II Lax solution
//
//   dPsi/dlambda = A(lambda, x) Psi,
//   A = -4i lambda^2 s3 + 4i lambda [[0, u], [-u, 0]]
//       + [[-ix - 2iu^2, -2u_x], [-2u_x, ix + 2iu^2]],
//
// normalized by Psi = (I + O(1/lambda)) exp(-i theta s3), theta = 4/3 lambda^3 + x lambda,
// as lambda -> inf with 0 < arg lambda < pi.
//
// The column is integrated in phase-extracted form phi = psi * exp(i theta),
// which satisfies phi' = B phi with B = A + i(4 lambda^2 + x) I. It starts at
// lambda0 = iR from the formal series at infinity, where it is recessive, and
// follows the dog-leg iR -> 0 -> lambda.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "gapdet/errors.hpp"
#include "gapdet/hastings_mcleod.hpp"
#include "gapdet/ode.hpp"

namespace gapdet {

using Mat2 = std::array<std::array<cplx, 2>, 2>;

inline constexpr cplx I_unit{0.0, 1.0};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

inline cplx phase_theta(double x, cplx lambda) {
  return 4.0 / 3.0 * lambda * lambda * lambda + x * lambda;
}

inline Mat2 lax_matrix(const PainleveData& d, cplx l) {
  const double u2 = d.u * d.u;
  return {{{-4.0 * I_unit * l * l - I_unit * (d.x + 2.0 * u2), 4.0 * I_unit * l * d.u - 2.0 * d.u_x},
           {-4.0 * I_unit * l * d.u - 2.0 * d.u_x, 4.0 * I_unit * l * l + I_unit * (d.x + 2.0 * u2)}}};
}

/// B = A + i theta'(lambda) I; drives the phase-extracted first column.
inline Mat2 phase_extracted_matrix(const PainleveData& d, cplx l) {
  const double u2 = d.u * d.u;
  return {{{-2.0 * I_unit * u2, 4.0 * I_unit * l * d.u - 2.0 * d.u_x},
           {-4.0 * I_unit * l * d.u - 2.0 * d.u_x,
            8.0 * I_unit * l * l + 2.0 * I_unit * d.x + 2.0 * I_unit * u2}}};
}

/// Coefficients m_0 = I, m_1, ..., m_order of the formal solution
/// Psi ~ (I + sum m_k lambda^-k) exp(-i theta s3).
///
/// Matching powers of lambda gives, at level j,
///   4i (m_j s3 - s3 m_j) = -(j-3) m_{j-3} - A1 m_{j-1} - A0 m_{j-2} - i x m_{j-2} s3,
/// whose off-diagonal part fixes offdiag(m_j) and whose diagonal part fixes
/// diag(m_{j-3}); the dependence on diag(m_{j-2}) cancels identically.
inline std::vector<Mat2> formal_series(const PainleveData& d, int order) {
  if (order < 0) throw range_error("formal_series: negative order");
  const Mat2 zero{};
  const Mat2 a1 = {{{0.0, 4.0 * I_unit * d.u}, {-4.0 * I_unit * d.u, 0.0}}};
  const double u2 = d.u * d.u;
  const Mat2 a0 = {{{-I_unit * (d.x + 2.0 * u2), -2.0 * d.u_x},
                    {-2.0 * d.u_x, I_unit * (d.x + 2.0 * u2)}}};
  std::vector<Mat2> m(static_cast<std::size_t>(order) + 3, zero);
  m[0] = {{{1.0, 0.0}, {0.0, 1.0}}};
  auto get = [&](int k) -> const Mat2& { return k < 0 ? zero : m[static_cast<std::size_t>(k)]; };
  auto level = [&](int j) {
    const Mat2 p1 = a1 * get(j - 1);
    const Mat2 p2 = a0 * get(j - 2);
    const Mat2& q = get(j - 2);
    const Mat2& r3 = get(j - 3);
    Mat2 r{};
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 2; ++k) {
        const double s3 = k == 0 ? 1.0 : -1.0;
        r[i][k] = -static_cast<double>(j - 3) * r3[i][k] - p1[i][k] - p2[i][k] -
                  I_unit * d.x * q[i][k] * s3;
      }
    }
    return r;
  };
  auto set_offdiag = [&](int j) {
    const Mat2 r = level(j);
    m[static_cast<std::size_t>(j)][0][1] = I_unit * r[0][1] / 8.0;
    m[static_cast<std::size_t>(j)][1][0] = -I_unit * r[1][0] / 8.0;
  };
  for (int k = 1; k <= order; ++k) {
    set_offdiag(k);
    auto& mk = m[static_cast<std::size_t>(k)];
    auto& mk1 = m[static_cast<std::size_t>(k) + 1];
    mk[0][0] = mk[1][1] = 0.0;
    mk1[0][0] = mk1[1][1] = 0.0;
    set_offdiag(k + 1);
    set_offdiag(k + 2);
    const Mat2 r = level(k + 3);
    mk[0][0] = r[0][0] / static_cast<double>(k);
    mk[1][1] = r[1][1] / static_cast<double>(k);
  }
  m.resize(static_cast<std::size_t>(order) + 1);
  return m;
}

/// Column `col` of I + sum m_k lambda^-k, summed until the terms stop decreasing.
inline CVector<2> series_column(const std::vector<Mat2>& m, cplx lambda, int col) {
  CVector<2> out{m[0][0][col], m[0][1][col]};
  const cplx inv = 1.0 / lambda;
  cplx p = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < m.size(); ++k) {
    p *= inv;
    const cplx t0 = m[k][0][col] * p;
    const cplx t1 = m[k][1][col] * p;
    const double size = std::abs(t0) + std::abs(t1);
    if (size > last) break;
    out[0] += t0;
    out[1] += t1;
    last = size;
  }
  return out;
}

struct PsiOptions {
  double radius = 8.0;      // start point lambda0 = i * radius
  int series_order = 24;    // order of the expansion at infinity; 1 = m1 only
  double rtol = 1e-12;      // local tolerance of the integrator
};

/// phi = (phi1, phi2) = (psi11, psi21) * exp(i theta) at `lambda`.
struct PhaseExtractedColumn {
  cplx lambda;
  cplx phi1;
  cplx phi2;
  cplx theta;

  cplx psi11() const { return phi1 * std::exp(-I_unit * theta); }
  cplx psi21() const { return phi2 * std::exp(-I_unit * theta); }
};

enum class PsiPath { dog_leg, direct };

namespace psi_detail {

inline CVector<2> integrate_phi(const PainleveData& d, CVector<2> phi, cplx from, cplx to,
                                double rtol) {
  auto rhs = [&d](cplx l, const CVector<2>& y) {
    const Mat2 b = phase_extracted_matrix(d, l);
    return CVector<2>{b[0][0] * y[0] + b[0][1] * y[1], b[1][0] * y[0] + b[1][1] * y[1]};
  };
  SegmentOptions opt;
  opt.rtol = rtol;
  return integrate_segment<2>(rhs, phi, from, to, opt);
}

inline void check_lambda(double lambda) {
  if (!(std::abs(lambda) <= 4.0)) {
    throw range_error("psi: |lambda| must not exceed 4, got " + std::to_string(lambda));
  }
}

}  // namespace psi_detail

/// Integrates the first column from scratch along the chosen path.
inline PhaseExtractedColumn solve_column(const PainleveData& d, cplx lambda,
                                         const PsiOptions& opt = {},
                                         PsiPath path = PsiPath::dog_leg) {
  const cplx l0 = I_unit * opt.radius;
  const auto m = formal_series(d, opt.series_order);
  CVector<2> phi = series_column(m, l0, 0);
  if (path == PsiPath::dog_leg) {
    phi = psi_detail::integrate_phi(d, phi, l0, 0.0, opt.rtol);
    phi = psi_detail::integrate_phi(d, phi, 0.0, lambda, opt.rtol);
  } else {
    phi = psi_detail::integrate_phi(d, phi, l0, lambda, opt.rtol);
  }
  return {lambda, phi[0], phi[1], phase_theta(d.x, lambda)};
}

/// Full 2x2 Psi at lambda. The second column is recessive on the ray
/// arg lambda = pi/6 and is started there from the same formal series.
inline Mat2 psi_matrix(const PainleveData& d, cplx lambda, const PsiOptions& opt = {}) {
  const auto col1 = solve_column(d, lambda, opt);
  const auto m = formal_series(d, opt.series_order);
  const cplx l0 = std::polar(opt.radius, std::numbers::pi / 6.0);
  // chi = psi_col2 * exp(-i theta) obeys chi' = (A - i theta' I) chi.
  auto rhs = [&d](cplx l, const CVector<2>& y) {
    Mat2 a = lax_matrix(d, l);
    const cplx shift = I_unit * (4.0 * l * l + d.x);
    a[0][0] -= shift;
    a[1][1] -= shift;
    return CVector<2>{a[0][0] * y[0] + a[0][1] * y[1], a[1][0] * y[0] + a[1][1] * y[1]};
  };
  SegmentOptions so;
  so.rtol = opt.rtol;
  CVector<2> chi = series_column(m, l0, 1);
  chi = integrate_segment<2>(rhs, chi, l0, 0.0, so);
  chi = integrate_segment<2>(rhs, chi, 0.0, lambda, so);
  const cplx e = std::exp(I_unit * phase_theta(d.x, lambda));
  return {{{col1.psi11(), chi[0] * e}, {col1.psi21(), chi[1] * e}}};
}

/// Psi-function data at a fixed x with a cache of first columns at real lambda.
/// Immutable apart from the cache, which is internally synchronized.
class PsiField {
 public:
  explicit PsiField(PainleveData data, PsiOptions opt = {},
                    std::shared_ptr<const HastingsMcLeodSolution> hm = nullptr)
      : data_(data), opt_(opt), hm_(std::move(hm)) {
    const cplx l0 = I_unit * opt_.radius;
    const auto m = formal_series(data_, opt_.series_order);
    base_ = psi_detail::integrate_phi(data_, series_column(m, l0, 0), l0, 0.0, opt_.rtol);
  }

  static std::shared_ptr<const PsiField> from_solution(
      std::shared_ptr<const HastingsMcLeodSolution> hm, double x, PsiOptions opt = {}) {
    if (!hm) throw std::invalid_argument("PsiField: null Hastings-McLeod solution");
    if (!hm->contains(x)) {
      throw range_error("PsiField: x = " + std::to_string(x) + " outside the solved window");
    }
    const PainleveData d = hm->data_at(x);
    return std::make_shared<const PsiField>(d, opt, std::move(hm));
  }

  double x() const noexcept { return data_.x; }
  const PainleveData& data() const noexcept { return data_; }
  const PsiOptions& options() const noexcept { return opt_; }
  const std::shared_ptr<const HastingsMcLeodSolution>& solution() const noexcept { return hm_; }

  /// Column at real lambda, served from the cache when present.
  PhaseExtractedColumn column(double lambda) const {
    {
      std::shared_lock lock(mu_);
      if (auto it = cache_.find(lambda); it != cache_.end()) return it->second;
    }
    PhaseExtractedColumn c = fresh_column(lambda);
    std::unique_lock lock(mu_);
    cache_[lambda] = c;
    return c;
  }

  /// Column at real lambda, integrated from the stored value at 0; bypasses the cache.
  PhaseExtractedColumn fresh_column(double lambda) const {
    psi_detail::check_lambda(lambda);
    const CVector<2> phi = psi_detail::integrate_phi(data_, base_, 0.0, lambda, opt_.rtol);
    return {lambda, phi[0], phi[1], phase_theta(data_.x, lambda)};
  }

  /// Continues a computed column along the real axis to `lambda`.
  PhaseExtractedColumn propagate(const PhaseExtractedColumn& from, double lambda) const {
    psi_detail::check_lambda(lambda);
    const CVector<2> phi =
        psi_detail::integrate_phi(data_, {from.phi1, from.phi2}, from.lambda, lambda, opt_.rtol);
    return {lambda, phi[0], phi[1], phase_theta(data_.x, lambda)};
  }

  std::size_t cache_size() const {
    std::shared_lock lock(mu_);
    return cache_.size();
  }

 private:
  PainleveData data_;
  PsiOptions opt_;
  std::shared_ptr<const HastingsMcLeodSolution> hm_;
  CVector<2> base_{};
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<double, PhaseExtractedColumn> cache_;
};

inline PhaseExtractedColumn psi_column(const PsiField& field, double lambda) {
  return field.column(lambda);
}

/// (psi11', psi21') at real lambda, read off the Lax system.
inline std::array<cplx, 2> psi_column_derivative(const PsiField& field, double lambda) {
  const PhaseExtractedColumn c = field.column(lambda);
  const Mat2 a = lax_matrix(field.data(), lambda);
  const cplx p1 = c.psi11();
  const cplx p2 = c.psi21();
  return {a[0][0] * p1 + a[0][1] * p2, a[1][0] * p1 + a[1][1] * p2};
}

}  // namespace gapdet

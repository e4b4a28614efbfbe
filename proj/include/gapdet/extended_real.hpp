// SPDX-License-Identifier: MIT
//
// Double-double arithmetic: an unevaluated sum hi + lo of two binary64 values,
// normalized so that |lo| <= ulp(hi)/2. Gives roughly 31 significant decimal
// digits with the exponent range of double.
//
// Error-free transformations follow the classical two-sum / two-product
// constructions (Knuth, Dekker); the accurate add/mul/div variants follow
// Joldes, Muller and Popescu (ACM TOMS 44, 2018).
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gapdet {

namespace eft {

/// s + e == a + b exactly, no precondition on magnitudes.
struct SumErr {
  double s, e;
};

inline SumErr two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

/// Requires |a| >= |b| (or a == 0).
inline SumErr fast_two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double e = b - (s - a);
  return {s, e};
}

inline SumErr split(double a) noexcept {
  constexpr double splitter = 134217729.0;  // 2^27 + 1
  const double t = splitter * a;
  const double hi = t - (t - a);
  return {hi, a - hi};
}

inline SumErr two_prod_dekker(double a, double b) noexcept {
  const double p = a * b;
  const auto [ah, al] = split(a);
  const auto [bh, bl] = split(b);
  const double e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
  return {p, e};
}

inline SumErr two_prod_fma(double a, double b) noexcept {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline SumErr two_prod(double a, double b) noexcept {
#ifdef FP_FAST_FMA
  return two_prod_fma(a, b);
#else
  return two_prod_dekker(a, b);
#endif
}

}  // namespace eft

class ExtendedReal {
 public:
  constexpr ExtendedReal() noexcept = default;
  constexpr ExtendedReal(double x) noexcept : hi_(x), lo_(0.0) {}  // NOLINT
  constexpr ExtendedReal(int x) noexcept : hi_(x), lo_(0.0) {}     // NOLINT

  /// Builds hi + lo and renormalizes; any pair of finite doubles is accepted.
  static ExtendedReal from_pair(double hi, double lo) noexcept {
    const auto [s, e] = eft::two_sum(hi, lo);
    return raw(s, e);
  }

  /// Parses a decimal literal such as "-0.1654211437004509292139196602427806".
  /// Exact up to the final rounding for literals of at most ~31 significant
  /// digits; longer mantissas are accumulated and rounded.
  static ExtendedReal parse(std::string_view text);

  static ExtendedReal sum(double a, double b) noexcept {
    const auto [s, e] = eft::two_sum(a, b);
    return raw(s, e);
  }
  static ExtendedReal product(double a, double b) noexcept {
    const auto [p, e] = eft::two_prod(a, b);
    return raw(p, e);
  }

  constexpr double hi() const noexcept { return hi_; }
  constexpr double lo() const noexcept { return lo_; }
  constexpr explicit operator double() const noexcept { return hi_ + lo_; }
  constexpr double to_double() const noexcept { return hi_ + lo_; }

  constexpr ExtendedReal operator-() const noexcept { return raw(-hi_, -lo_); }

  ExtendedReal& operator+=(const ExtendedReal& b) noexcept;
  ExtendedReal& operator-=(const ExtendedReal& b) noexcept { return *this += -b; }
  ExtendedReal& operator*=(const ExtendedReal& b) noexcept;
  ExtendedReal& operator/=(const ExtendedReal& b) noexcept;
  ExtendedReal& operator+=(double b) noexcept;
  ExtendedReal& operator-=(double b) noexcept { return *this += -b; }
  ExtendedReal& operator*=(double b) noexcept;
  ExtendedReal& operator/=(double b) noexcept { return *this /= ExtendedReal(b); }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    return a.hi_ == b.hi_ && a.lo_ == b.lo_;
  }
  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    return a.hi_ < b.hi_ || (a.hi_ == b.hi_ && a.lo_ < b.lo_);
  }
  friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) noexcept { return b < a; }
  friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) noexcept { return !(b < a); }
  friend bool operator>=(const ExtendedReal& a, const ExtendedReal& b) noexcept { return !(a < b); }

  /// Decimal rendering with the requested number of significant digits.
  std::string to_string(int digits = 32) const;

 private:
  static constexpr ExtendedReal raw(double hi, double lo) noexcept {
    ExtendedReal r;
    r.hi_ = hi;
    r.lo_ = lo;
    return r;
  }

  double hi_ = 0.0;
  double lo_ = 0.0;

  friend ExtendedReal ldexp(const ExtendedReal& a, int e) noexcept;
};

inline ExtendedReal& ExtendedReal::operator+=(const ExtendedReal& b) noexcept {
  auto [s, e] = eft::two_sum(hi_, b.hi_);
  const auto [t, f] = eft::two_sum(lo_, b.lo_);
  e += t;
  auto r = eft::fast_two_sum(s, e);
  r.e += f;
  r = eft::fast_two_sum(r.s, r.e);
  hi_ = r.s;
  lo_ = r.e;
  return *this;
}

inline ExtendedReal& ExtendedReal::operator+=(double b) noexcept {
  auto [s, e] = eft::two_sum(hi_, b);
  e += lo_;
  const auto r = eft::fast_two_sum(s, e);
  hi_ = r.s;
  lo_ = r.e;
  return *this;
}

inline ExtendedReal& ExtendedReal::operator*=(const ExtendedReal& b) noexcept {
  auto [p, e] = eft::two_prod(hi_, b.hi_);
  e += hi_ * b.lo_ + lo_ * b.hi_;
  const auto r = eft::fast_two_sum(p, e);
  hi_ = r.s;
  lo_ = r.e;
  return *this;
}

inline ExtendedReal& ExtendedReal::operator*=(double b) noexcept {
  auto [p, e] = eft::two_prod(hi_, b);
  e += lo_ * b;
  const auto r = eft::fast_two_sum(p, e);
  hi_ = r.s;
  lo_ = r.e;
  return *this;
}

inline ExtendedReal operator+(ExtendedReal a, const ExtendedReal& b) noexcept { return a += b; }
inline ExtendedReal operator-(ExtendedReal a, const ExtendedReal& b) noexcept { return a -= b; }
inline ExtendedReal operator*(ExtendedReal a, const ExtendedReal& b) noexcept { return a *= b; }
inline ExtendedReal operator/(ExtendedReal a, const ExtendedReal& b) noexcept { return a /= b; }
inline ExtendedReal operator+(ExtendedReal a, double b) noexcept { return a += b; }
inline ExtendedReal operator-(ExtendedReal a, double b) noexcept { return a -= b; }
inline ExtendedReal operator*(ExtendedReal a, double b) noexcept { return a *= b; }
inline ExtendedReal operator/(ExtendedReal a, double b) noexcept { return a /= b; }
inline ExtendedReal operator+(double a, ExtendedReal b) noexcept { return b += a; }
inline ExtendedReal operator-(double a, const ExtendedReal& b) noexcept { return -b + a; }
inline ExtendedReal operator*(double a, ExtendedReal b) noexcept { return b *= a; }
inline ExtendedReal operator/(double a, const ExtendedReal& b) noexcept { return ExtendedReal(a) / b; }

inline ExtendedReal& ExtendedReal::operator/=(const ExtendedReal& b) noexcept {
  // Three-term long division; the third quotient digit absorbs the residual.
  const double q1 = hi_ / b.hi_;
  ExtendedReal r = *this - b * q1;
  const double q2 = r.hi_ / b.hi_;
  r -= b * q2;
  const double q3 = r.hi_ / b.hi_;
  auto s = eft::fast_two_sum(q1, q2);
  ExtendedReal q = raw(s.s, s.e);
  q += q3;
  *this = q;
  return *this;
}

inline ExtendedReal abs(const ExtendedReal& a) noexcept { return a.hi() < 0.0 ? -a : a; }

inline ExtendedReal ldexp(const ExtendedReal& a, int e) noexcept {
  return ExtendedReal::raw(std::ldexp(a.hi_, e), std::ldexp(a.lo_, e));
}

inline bool isfinite(const ExtendedReal& a) noexcept {
  return std::isfinite(a.hi()) && std::isfinite(a.lo());
}

inline ExtendedReal sqr(const ExtendedReal& a) noexcept { return a * a; }

inline ExtendedReal sqrt(const ExtendedReal& a) {
  if (a.hi() < 0.0) return ExtendedReal(std::numeric_limits<double>::quiet_NaN());
  if (a.hi() == 0.0) return ExtendedReal(0.0);
  const double y = std::sqrt(a.hi());
  // One Newton step from the binary64 root doubles the correct digits.
  const ExtendedReal yy = ExtendedReal::product(y, y);
  return ExtendedReal(y) + (a - yy) / (2.0 * y);
}

namespace detail {

inline const ExtendedReal& ln2_dd() {
  static const ExtendedReal v =
      ExtendedReal::from_pair(0.6931471805599453, 2.3190468138462996e-17);
  return v;
}

// ln 2 - ln2_dd(), applied to k ln 2 in the argument reduction of exp.
inline constexpr double ln2_tail = 5.707708438416212e-34;

}  // namespace detail

inline ExtendedReal exp(const ExtendedReal& a) {
  if (a.hi() > 709.0) return ExtendedReal(std::numeric_limits<double>::infinity());
  if (a.hi() < -745.0) return ExtendedReal(0.0);
  constexpr int halvings = 10;
  const double k = std::nearbyint(a.hi() / detail::ln2_dd().hi());
  // Each product k * c is formed exactly, so the reduction loses nothing to k.
  ExtendedReal r = a - ExtendedReal::product(detail::ln2_dd().hi(), k);
  r -= ExtendedReal::product(detail::ln2_dd().lo(), k);
  r -= detail::ln2_tail * k;
  r = ldexp(r, -halvings);
  // expm1 on the reduced argument, then (1+s)^2 - 1 = s(2+s) per squaring.
  ExtendedReal term = r;
  ExtendedReal s = r;
  for (int j = 2; j <= 12; ++j) {
    term = term * r / static_cast<double>(j);
    s += term;
    if (std::abs(term.hi()) < 1e-36) break;
  }
  for (int i = 0; i < halvings; ++i) s = s * (s + 2.0);
  return ldexp(s + 1.0, static_cast<int>(k));
}

inline ExtendedReal log(const ExtendedReal& a) {
  if (a.hi() <= 0.0) {
    return ExtendedReal(a.hi() == 0.0 ? -std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::quiet_NaN());
  }
  const ExtendedReal y = std::log(a.hi());
  // log a = y + log1p(t); |t| is a few ulps of |y|, so three terms suffice.
  const ExtendedReal t = a * exp(-y) - 1.0;
  return y + t * (1.0 - t * (0.5 - t / 3.0));
}

inline ExtendedReal ExtendedReal::parse(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  ExtendedReal mant(0.0);
  int exp10 = 0;
  bool seen_digit = false;
  bool after_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (after_point) throw std::invalid_argument("malformed number: " + std::string(text));
      after_point = true;
    } else if (c >= '0' && c <= '9') {
      mant = mant * 10.0 + static_cast<double>(c - '0');
      if (after_point) --exp10;
      seen_digit = true;
    } else if (c == 'e' || c == 'E') {
      exp10 += std::stoi(std::string(text.substr(i + 1)));
      break;
    } else {
      throw std::invalid_argument("malformed number: " + std::string(text));
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed number: " + std::string(text));
  ExtendedReal scale(1.0);
  const int n = exp10 < 0 ? -exp10 : exp10;
  for (int k = 0; k < n; ++k) scale *= 10.0;
  mant = exp10 < 0 ? mant / scale : mant * scale;
  return negative ? -mant : mant;
}

inline std::string ExtendedReal::to_string(int digits) const {
  if (!isfinite(*this)) return std::to_string(hi_);
  if (hi_ == 0.0) return "0";
  ExtendedReal v = abs(*this);
  int e10 = static_cast<int>(std::floor(std::log10(v.hi())));
  ExtendedReal p(1.0);
  for (int k = 0; k < (e10 < 0 ? -e10 : e10); ++k) p *= 10.0;
  v = e10 < 0 ? v * p : v / p;
  if (v.hi() >= 10.0) {
    v /= 10.0;
    ++e10;
  } else if (v.hi() < 1.0) {
    v *= 10.0;
    --e10;
  }
  std::string mant;
  for (int k = 0; k < digits; ++k) {
    int d = static_cast<int>(std::floor(v.hi()));
    if (d > 9) d = 9;
    if (d < 0) d = 0;
    mant.push_back(static_cast<char>('0' + d));
    v = (v - static_cast<double>(d)) * 10.0;
  }
  std::string out = hi_ < 0.0 ? "-" : "";
  out += mant.substr(0, 1);
  if (mant.size() > 1) out += "." + mant.substr(1);
  out += "e" + std::to_string(e10);
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const ExtendedReal& a) {
  return os << a.to_string();
}

}  // namespace gapdet

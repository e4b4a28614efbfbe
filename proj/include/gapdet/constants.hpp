// SPDX-License-Identifier: MIT
#pragma once

#include "gapdet/extended_real.hpp"

namespace gapdet {

/// Constants entering the large-gap expansions.
struct Constants {
  ExtendedReal zeta_prime_minus1;  // zeta'(-1) = 1/12 - ln A (Glaisher-Kinkelin A)
  ExtendedReal ln2;
  ExtendedReal omega0;             // -(1/6) ln 2 + 3 zeta'(-1)
  ExtendedReal dyson_const;        // (1/12) ln 2 + 3 zeta'(-1)
};

inline ExtendedReal zeta_prime_minus1() {
  static const ExtendedReal v =
      ExtendedReal::parse("-0.16542114370045092921391966024278064276403638");
  return v;
}

inline const Constants& constants() {
  static const Constants c = [] {
    Constants k;
    k.zeta_prime_minus1 = zeta_prime_minus1();
    k.ln2 = ExtendedReal::parse("0.69314718055994530941723212145817656807550013");
    k.omega0 = -(k.ln2 / 6.0) + 3.0 * k.zeta_prime_minus1;
    k.dyson_const = k.ln2 / 12.0 + 3.0 * k.zeta_prime_minus1;
    return k;
  }();
  return c;
}

}  // namespace gapdet

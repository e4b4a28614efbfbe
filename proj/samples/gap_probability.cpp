// SPDX-License-Identifier: MIT
//
// Probability that (-s, s) holds no eigenvalue at the critical point, compared
// with the large-gap expansion including the Tracy-Widom term.
#include <cmath>
#include <cstdio>

#include "gapdet/gapdet.hpp"

int main() {
  using namespace gapdet;
  const double x = 0.0;
  const KernelSpec k = painleve_kernel(x);
  const auto& hm = *default_hm_solution();
  std::printf("%6s %5s %22s %22s %12s\n", "s", "n", "log det(I-K)", "expansion", "difference");
  for (double s : {0.5, 1.0, 1.5, 2.0}) {
    const DetEvaluation e = log_det_converged(k, s);
    const double predicted = theorem1_prediction(s, x, hm).value;
    const double value = e.log_det.to_double();
    std::printf("%6.2f %5d %22.15f %22.15f %12.3e\n", s, e.n, value, predicted, value - predicted);
  }
  std::printf("gap probability at s = 1: %.15g\n", std::exp(log_det_converged(k, 1.0).log_det.to_double()));
  return 0;
}

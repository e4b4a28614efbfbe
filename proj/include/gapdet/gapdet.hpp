// SPDX-License-Identifier: MIT
#pragma once

#include <memory>
#include <mutex>

#include "gapdet/airy.hpp"
#include "gapdet/asymptotics.hpp"
#include "gapdet/constants.hpp"
#include "gapdet/errors.hpp"
#include "gapdet/extended_real.hpp"
#include "gapdet/fredholm.hpp"
#include "gapdet/hastings_mcleod.hpp"
#include "gapdet/kernels.hpp"
#include "gapdet/log_det.hpp"
#include "gapdet/psi.hpp"
#include "gapdet/quadrature.hpp"

namespace gapdet {

inline constexpr double default_hm_left = -10.0;
inline constexpr double default_hm_right = 10.0;
inline constexpr double default_hm_step = 0.0025;

/// Hastings-McLeod solution on the default window, solved once per process.
inline std::shared_ptr<const HastingsMcLeodSolution> default_hm_solution() {
  static const std::shared_ptr<const HastingsMcLeodSolution> sol =
      std::make_shared<const HastingsMcLeodSolution>(
          solve_hm(default_hm_left, default_hm_right, default_hm_step));
  return sol;
}

/// PII kernel at x on the default solution.
inline KernelSpec painleve_kernel(double x, PsiOptions opt = {}) {
  return PainleveKernel{PsiField::from_solution(default_hm_solution(), x, opt)};
}

}  // namespace gapdet

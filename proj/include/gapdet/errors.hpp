// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapdet {

/// Argument outside the documented domain of an operation.
class range_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Iterative method failed to converge.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed quantity violates a structural invariant (a numerical fault).
class integrity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class singular_matrix_error : public std::runtime_error {
 public:
  explicit singular_matrix_error(std::size_t step)
      : std::runtime_error("singular matrix: zero pivot at elimination step " +
                           std::to_string(step)),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Adaptive integrator step size underflowed.
class stiffness_error : public std::runtime_error {
 public:
  stiffness_error(const std::string& what, double re, double im)
      : std::runtime_error(what), re_(re), im_(im) {}
  double position_real() const noexcept { return re_; }
  double position_imag() const noexcept { return im_; }

 private:
  double re_, im_;
};

/// Newton iteration whose residual kept growing.
class divergence_error : public convergence_error {
 public:
  divergence_error(const std::string& what, std::vector<double> trace)
      : convergence_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace gapdet

#pragma once

#include <array>
#include <cstddef>
#include <functional>

namespace cauchygof {

struct NelderMeadResult {
  std::array<double, 2> x{};
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Two-dimensional Nelder-Mead (standard coefficients 1, 2, 1/2, 1/2).
// Stops when the simplex diameter falls below diameter_tol.
NelderMeadResult nelder_mead(
    const std::function<double(const std::array<double, 2>&)>& f,
    std::array<double, 2> start, double initial_step, double diameter_tol,
    std::size_t max_iterations);

}  // namespace cauchygof

#pragma once

#include <functional>

#include "irmap/types.hpp"

namespace irmap {

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Derivative-free simplex minimizer (reflection / expansion / contraction /
// shrink). Stops when the simplex value spread and diameter drop below tol.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f,
                             const Vector& start, double initial_step,
                             double tol = 1e-12, int max_iterations = 2000);

}  // namespace irmap

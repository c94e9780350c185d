#pragma once

#include <functional>

namespace omckit {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_depth = 60;
};

/// Adaptive Gauss-Kronrod (7,15) integration of f over [a, b].
/// Bisects until the Kronrod error estimate meets the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

/// Integral of a peaked function over (-inf, inf), centered near `center`
/// with characteristic width `width`: integrates the core densely and maps
/// the tails through a 1/t substitution.
double integrate_peaked(const std::function<double(double)>& f, double center,
                        double width, const QuadratureOptions& opts = {});

}  // namespace omckit

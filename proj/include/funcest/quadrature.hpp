#pragma once

#include <functional>
#include <limits>

namespace funcest {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod (61-point) integration of f over [a, b]; either
/// bound may be infinite. Used as the independent oracle for the closed-form
/// divergence formulas.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-13, unsigned max_depth = 30);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace funcest

#pragma once

#include <cmath>
#include <functional>

namespace ibmag {

/// Adaptive Simpson quadrature of f over [a, b].
///
/// Recursion stops when the Richardson-corrected estimate changes by less than
/// max(rel_tol * |whole|, abs_floor) or at max_depth.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-9, double abs_floor = 1e-15, int max_depth = 48);

}  // namespace ibmag

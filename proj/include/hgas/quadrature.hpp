#pragma once

#include <functional>
#include <span>

namespace hgas {

/// Adaptive Simpson with Richardson correction. Throws ToleranceError when
/// the recursion depth is exhausted before the absolute tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-9,
                        int max_depth = 48);

/// adaptive_simpson on [a, b] split at every breakpoint strictly inside it.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, double abs_tol = 1e-9);

/// Root of a sign-changing f on [lo, hi] by bisection to the given width.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

}  // namespace hgas

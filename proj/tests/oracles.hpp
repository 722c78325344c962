#pragma once

// Test-side oracles, independent of the library's evaluation paths.

#include <cmath>
#include <functional>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson(f, a, m), right = simpson(f, m, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, right, tol / 2.0, depth - 1);
}

// Adaptive Simpson quadrature, the workhorse oracle for frozen values.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  return adaptive_simpson_rec(f, a, b, simpson(f, a, b), tol, 40);
}

}  // namespace oracles

#include "kreinlab/sine_integral.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace kreinlab {
namespace {

constexpr double kCrossover = 4.0;

// Direct power series, alternating and well conditioned below the
// crossover (largest term ~ e^x / x stays modest there).
double si_series(double x) {
  const double x2 = x * x;
  double u = x;       // sin-series term x^{2k+1}/(2k+1)!
  double sum = x;     // running Si
  for (int k = 1; k < 64; ++k) {
    u *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
    const double term = u / (2.0 * k + 1.0);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// E1(ix) by the modified Lentz continued fraction
//   E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...))))
// and Si(x) = pi/2 - Im E1(ix) for x > 0.
double si_continued_fraction(double x) {
  using C = std::complex<double>;
  const C z(0.0, x);
  const double tiny = 1e-30;
  C b = z + 1.0;
  C c = 1.0 / tiny;
  C d = 1.0 / b;
  C f = d;
  for (int k = 1; k < 200; ++k) {
    const double ak = -static_cast<double>(k) * static_cast<double>(k);
    b += 2.0;
    d = 1.0 / (ak * d + b);
    c = b + ak / c;
    const C delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  // E1(ix) = -Ci(x) - i (pi/2 - Si(x))
  const C e1 = std::exp(-z) * f;
  return std::numbers::pi / 2.0 + e1.imag();
}

}  // namespace

double sine_integral(double x) {
  if (x < 0.0) return -sine_integral(-x);
  if (x == 0.0) return 0.0;
  if (x < kCrossover) return si_series(x);
  return si_continued_fraction(x);
}

}  // namespace kreinlab

#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace kreinlab {

using Complex = std::complex<double>;

// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on P_n.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Polynomial extrapolation of (x_i, f_i) to x = 0 (Neville tableau).
double neville_to_zero(std::span<const double> xs, std::span<const double> fs);

// Value interpolated from samples on the uniform grid x0 + k*dx using a
// centered 8-point Lagrange stencil (one-sided near the ends).
double lagrange_uniform(std::span<const double> f, double x0, double dx, double x);

// sin(c*x)/x, continuous through x = 0.
double sinc_over_x(double c, double x);

}  // namespace kreinlab

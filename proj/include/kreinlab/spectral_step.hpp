#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace kreinlab {

// Piecewise-constant even spectral density rho on a partition
// 0 = a_0 < a_1 < ... < a_n, with value c_k on [a_{k-1}, a_k) and 0 beyond
// a_n.  c_1 = 1 and |c_k| <= 1, so the uniform bound U = 1 applies.  The
// coupling mu enters the convolution operator S = I - mu * h(x-t) whose
// kernel is the Fourier transform
//
//   h(x) = (1/2pi) int rho(lam) e^{i lam x} dlam
//        = (1/pi) sum_k c_k (sin(a_k x) - sin(a_{k-1} x)) / x .
struct SpectralStep {
  std::vector<double> partition;  // a_0 .. a_n, a_0 = 0, strictly increasing
  std::vector<double> coeffs;     // c_1 .. c_n
  double mu = 0.0;

  static constexpr double bound = 1.0;  // U

  // Throws InvalidStep / InvalidCoupling.  Certificate-level use requires
  // 0 <= mu < 1 so that 1/sqrt(1-mu) is real; operator-level only |mu| < 1.
  void validate(bool certificate_range = false) const;

  std::size_t intervals() const { return coeffs.size(); }
  double a_max() const { return partition.back(); }

  double rho(double lam) const;
  double sigma_prime(double lam) const;  // [1 - mu rho(lam)] / (2 pi)
  double h(double x) const;

  // M(x) = 1/2 - mu int_0^x h,   q(x) = M(x) - (1-mu)/2.
  // The primitive of h is evaluated in closed form through Si:
  //   int_0^x h = (1/pi) sum_k c_k (Si(a_k x) - Si(a_{k-1} x)).
  std::pair<double, double> M_and_q(double x) const;
  double M(double x) const { return M_and_q(x).first; }
  double q(double x) const { return M_and_q(x).second; }
};

// int_R log(sigma'(u)) / (1+u^2) du in closed form (the integrand's log is
// piecewise constant, every piece integrates to a log times an arctan
// difference).  Requires 0 < mu < 1.
double szego_integral(const SpectralStep& step);

// Quadrature oracle for the same integral (substitution u = tan(theta),
// fixed-order Gauss-Legendre per smooth piece).
double szego_integral_quadrature(const SpectralStep& step, int order = 48);

}  // namespace kreinlab

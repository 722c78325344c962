#include "kreinlab/spectral_step.hpp"

#include <cmath>
#include <numbers>

#include "kreinlab/errors.hpp"
#include "kreinlab/numerics.hpp"
#include "kreinlab/sine_integral.hpp"

namespace kreinlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

void SpectralStep::validate(bool certificate_range) const {
  if (partition.size() < 2 || coeffs.size() + 1 != partition.size())
    throw InvalidStep("partition must hold a_0..a_n with one coefficient per interval");
  if (partition.front() != 0.0) throw InvalidStep("partition must start at a_0 = 0");
  for (std::size_t k = 1; k < partition.size(); ++k)
    if (!(partition[k] > partition[k - 1]))
      throw InvalidStep("partition must be strictly increasing");
  if (!std::isfinite(partition.back())) throw InvalidStep("partition must be finite");
  if (coeffs.front() != 1.0) throw InvalidStep("first coefficient must equal 1");
  for (double c : coeffs)
    if (!(std::abs(c) <= 1.0)) throw InvalidStep("coefficients must satisfy |c_k| <= 1");
  if (!(std::abs(mu) < 1.0 / bound))
    throw InvalidCoupling("coupling must satisfy |mu| < 1/U");
  if (certificate_range && !(mu > 0.0 && mu < 1.0))
    throw InvalidCoupling("certificate-level operations require 0 < mu < 1");
}

double SpectralStep::rho(double lam) const {
  const double a = std::abs(lam);
  if (a >= partition.back()) return 0.0;
  for (std::size_t k = 1; k < partition.size(); ++k)
    if (a < partition[k]) return coeffs[k - 1];
  return 0.0;
}

double SpectralStep::sigma_prime(double lam) const {
  return (1.0 - mu * rho(lam)) / (2.0 * kPi);
}

double SpectralStep::h(double x) const {
  // (sin(a_k x) - sin(a_{k-1} x))/x = 2 cos((a_k+a_{k-1}) x/2) sin((a_k-a_{k-1}) x/2)/x,
  // continuous through x = 0 with value a_k - a_{k-1}.
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double mid = 0.5 * (partition[k + 1] + partition[k]);
    const double half = 0.5 * (partition[k + 1] - partition[k]);
    sum += coeffs[k] * 2.0 * std::cos(mid * x) * sinc_over_x(half, x);
  }
  return sum / kPi;
}

std::pair<double, double> SpectralStep::M_and_q(double x) const {
  double primitive = 0.0;  // int_0^x h
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    primitive += coeffs[k] *
                 (sine_integral(partition[k + 1] * x) - sine_integral(partition[k] * x));
  primitive /= kPi;
  const double Mv = 0.5 - mu * primitive;
  return {Mv, Mv - (1.0 - mu) / 2.0};
}

double szego_integral(const SpectralStep& step) {
  step.validate();
  if (!(step.mu < 1.0)) throw InvalidCoupling("Szego integral requires mu < 1");
  // log sigma' is constant on each |u|-interval; int du/(1+u^2) over
  // [alpha, beta) + (-beta, -alpha] is 2(atan beta - atan alpha).
  double total = 0.0;
  for (std::size_t k = 0; k < step.coeffs.size(); ++k) {
    const double v = std::log((1.0 - step.mu * step.coeffs[k]) / (2.0 * kPi));
    total += 2.0 * (std::atan(step.partition[k + 1]) - std::atan(step.partition[k])) * v;
  }
  total += 2.0 * (kPi / 2.0 - std::atan(step.partition.back())) * std::log(1.0 / (2.0 * kPi));
  return total;
}

double szego_integral_quadrature(const SpectralStep& step, int order) {
  // u = tan(theta): int log sigma'(u)/(1+u^2) du = int log sigma'(tan theta) dtheta,
  // piecewise constant integrand with breakpoints atan(a_k); assembled per
  // smooth piece with Gauss-Legendre (exact up to roundoff, kept as an
  // independent route).
  const auto [xg, wg] = gauss_legendre(order);
  std::vector<double> breaks;
  breaks.push_back(0.0);
  for (std::size_t k = 1; k < step.partition.size(); ++k)
    breaks.push_back(std::atan(step.partition[k]));
  breaks.push_back(kPi / 2.0);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    for (int i = 0; i < order; ++i) {
      const double th = 0.5 * (a + b) + 0.5 * (b - a) * xg[i];
      total += 0.5 * (b - a) * wg[i] * std::log(step.sigma_prime(std::tan(th)));
    }
  }
  return 2.0 * total;  // even integrand, doubled half-line
}

}  // namespace kreinlab

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kreinlab/errors.hpp"
#include "kreinlab/sine_integral.hpp"
#include "kreinlab/spectral_step.hpp"
#include "oracles.hpp"

using namespace kreinlab;

namespace {
constexpr double kPi = std::numbers::pi;

SpectralStep sinc_step(double mu = 0.5) { return {{0.0, kPi}, {1.0}, mu}; }

SpectralStep two_step(double mu = 0.5) {
  return {{0.0, kPi, 2.0 * kPi}, {1.0, -0.5}, mu};
}
}  // namespace

TEST_CASE("sine integral against the quadrature oracle") {
  auto si_oracle = [](double x) {
    return oracles::integrate([](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; },
                              0.0, x, 1e-14);
  };

  CHECK(sine_integral(0.0) == 0.0);
  // oracle value frozen: Si(pi) = 1.8519370519824661...
  CHECK(std::abs(si_oracle(kPi) - 1.8519370519824661) < 1e-12);
  CHECK(std::abs(sine_integral(kPi) - 1.8519370519824661) < 1e-12);
  CHECK(std::abs(sine_integral(1e6) - kPi / 2.0) < 2e-6);

  for (double x : {0.05, 0.7, 1.9, 3.3, 3.999, 4.001, 5.5, 9.7, 16.0, 33.0, 80.0})
    CHECK(std::abs(sine_integral(x) - si_oracle(x)) < 1e-12);

  // odd extension and crossover continuity
  CHECK(sine_integral(-2.5) == -sine_integral(2.5));
  CHECK(std::abs(sine_integral(4.0 - 1e-10) - sine_integral(4.0 + 1e-10)) < 1e-10);

  // monotone approach to pi/2 along the tail envelope
  double prev = std::abs(sine_integral(1e2) - kPi / 2.0);
  for (double x : {1e3, 1e4, 1e5, 1e6}) {
    const double cur = std::abs(sine_integral(x) - kPi / 2.0);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("rho evaluation") {
  const SpectralStep s = sinc_step();
  CHECK(s.rho(1.0) == 1.0);
  CHECK(s.rho(4.0) == 0.0);
  CHECK(s.rho(kPi) == 0.0);  // right-open intervals
  const SpectralStep t = two_step();
  CHECK(t.rho(1.0) == 1.0);
  CHECK(t.rho(4.0) == -0.5);
  CHECK(t.rho(7.0) == 0.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(-8.0, 8.0);
  for (int i = 0; i < 100; ++i) {
    const double lam = uni(rng);
    CHECK(t.rho(lam) == t.rho(-lam));
  }
}

TEST_CASE("step validation") {
  CHECK_THROWS_AS(SpectralStep({0.0, -1.0}, {1.0}, 0.5).validate(), InvalidStep);
  CHECK_THROWS_AS(SpectralStep({0.5, 1.0}, {1.0}, 0.5).validate(), InvalidStep);
  CHECK_THROWS_AS(SpectralStep({0.0, 1.0}, {0.7}, 0.5).validate(), InvalidStep);
  CHECK_THROWS_AS(SpectralStep({0.0, 1.0, 2.0}, {1.0, 1.5}, 0.5).validate(),
                  InvalidStep);
  CHECK_THROWS_AS(sinc_step(1.0).validate(), InvalidCoupling);
  CHECK_THROWS_AS(sinc_step(-0.5).validate(true), InvalidCoupling);
  CHECK_NOTHROW(sinc_step(-0.5).validate());
  CHECK_NOTHROW(two_step(0.5).validate(true));
}

TEST_CASE("kernel h") {
  const SpectralStep s = sinc_step();
  CHECK(std::abs(s.h(0.5) - 2.0 / kPi) < 1e-15);  // sin(pi/2)/(pi/2)
  CHECK(std::abs(s.h(0.0) - 1.0) < 1e-15);
  for (double x : {0.3, 1.1, 2.7, 5.9}) CHECK(s.h(-x) == s.h(x));

  // h agrees with direct Fourier inversion of rho
  const SpectralStep t = two_step();
  for (double x : {0.4, 1.3, 3.7}) {
    const double inv = oracles::integrate(
        [&](double lam) { return t.rho(lam) * std::cos(x * lam) / kPi; }, 0.0,
        t.a_max(), 1e-13);
    CHECK(std::abs(t.h(x) - inv) < 1e-10);
  }
}

TEST_CASE("M and q") {
  const SpectralStep s = sinc_step();
  const auto [M0, q0] = s.M_and_q(0.0);
  CHECK(M0 == 0.5);
  CHECK(std::abs(q0 - 0.25) < 1e-16);

  // oracle: M(1) = 1/2 - mu int_0^1 h = 1/2 - Si(pi)/(2 pi) = 0.20527852...
  const double primitive =
      oracles::integrate([&](double t) { return s.h(t); }, 0.0, 1.0, 1e-14);
  const double M1 = s.M(1.0);
  CHECK(std::abs(M1 - (0.5 - 0.5 * primitive)) < 1e-12);
  CHECK(std::abs(M1 - 0.20527852138724) < 1e-11);

  // far field: M -> (1-mu)/2 within the 1/x tail envelope
  for (double x : {1e3, 1e4})
    CHECK(std::abs(s.M(x) - 0.25) < 1.0 / x);

  // tail envelope |int_x^inf h| <= K/x on [1, 1e3]
  double K = 0.0;
  for (double x = 1.0; x <= 1e3; x *= 1.3)
    K = std::max(K, std::abs(x * s.q(x) / s.mu));
  CHECK(K < 2.0);

  // dM/dx = -mu h by central differences, O(step^2) residual
  for (double x : {0.7, 2.3, 6.4}) {
    const double fd = 1e-5;
    const double der = (s.M(x + fd) - s.M(x - fd)) / (2.0 * fd);
    CHECK(std::abs(der + s.mu * s.h(x)) < 1e-8);
  }
}

TEST_CASE("sigma prime") {
  const SpectralStep s = sinc_step();
  CHECK(s.sigma_prime(4.0) == 1.0 / (2.0 * kPi));
  CHECK(std::abs(s.sigma_prime(1.0) - 1.0 / (4.0 * kPi)) < 1e-17);
  for (double lam : {0.2, 2.9, 7.7}) CHECK(s.sigma_prime(-lam) == s.sigma_prime(lam));
  const SpectralStep t = two_step();
  for (double lam = -8.0; lam <= 8.0; lam += 0.37) {
    CHECK(t.sigma_prime(lam) >= (1.0 - t.mu) / (2.0 * kPi) - 1e-16);
    CHECK(t.sigma_prime(lam) <= (1.0 + t.mu) / (2.0 * kPi) + 1e-16);
  }
}

TEST_CASE("Szego integral") {
  // mu = 0: constant integrand, -pi log(2 pi)
  const SpectralStep zero = sinc_step(0.0);
  CHECK(std::abs(szego_integral(zero) + kPi * std::log(2.0 * kPi)) < 1e-13);

  // closed-form value for the half-coupled single step
  const SpectralStep s = sinc_step();
  const double expected =
      -kPi * std::log(2.0 * kPi) + 2.0 * std::log(0.5) * std::atan(kPi);
  CHECK(std::abs(szego_integral(s) - expected) < 1e-13);
  CHECK(std::abs(szego_integral(s) - szego_integral_quadrature(s)) < 1e-10);

  const SpectralStep t = two_step(0.7);
  CHECK(std::isfinite(szego_integral(t)));
  CHECK(std::abs(szego_integral(t) - szego_integral_quadrature(t)) < 1e-10);
}

TEST_CASE("primitive of h reaches one half") {
  // only the first interval contributes at infinity: int_0^inf h = c_1/2
  for (const SpectralStep& s : {sinc_step(0.3), two_step(0.3)}) {
    const double inf_primitive = 0.5 - s.M(1e7) / s.mu - (0.5 / s.mu - 0.5);
    // equivalent statement through M: M(x) -> 1/2 - mu/2
    CHECK(std::abs(s.M(1e7) - (0.5 - s.mu / 2.0)) < 1e-6);
    (void)inf_primitive;
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kreinlab/certificate.hpp"
#include "kreinlab/errors.hpp"
#include "kreinlab/numerics.hpp"

using namespace kreinlab;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr Complex kI(0.0, 1.0);
SpectralStep sinc_step(double mu = 0.5) { return {{0.0, kPi}, {1.0}, mu}; }
SpectralStep two_step(double mu = 0.5) {
  return {{0.0, kPi, 2.0 * kPi}, {1.0, -0.5}, mu};
}
}  // namespace

TEST_CASE("pi_integral") {
  {  // mu = 0: the exponent vanishes identically
    CHECK(pi_integral(sinc_step(0.0), kI) == Complex(1.0));
    CHECK(std::abs(pi_integral_sigma_form(sinc_step(0.0), kI) - 1.0) < 1e-15);
  }

  for (const SpectralStep& s : {sinc_step(), two_step(0.5), sinc_step(0.75)}) {
    for (Complex z : {kI, Complex(1.0, 1.0), Complex(-0.7, 0.3), 2.0 * kI}) {
      const Complex a = pi_integral(s, z);
      CHECK(std::abs(a - pi_integral_quadrature(s, z)) < 1e-9);
      // the sigma'-form splits off the constant as the sqrt(2 pi) factor
      CHECK(std::abs(a - pi_integral_sigma_form(s, z)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(pi_integral(sinc_step(), Complex(1.0, -0.5)), Error);

  // boundary value along the imaginary axis: Pi(iy) -> sqrt(1-mu)
  for (double mu : {0.25, 0.5, 0.75}) {
    std::vector<double> ys, vals;
    for (double y = 0.01; y >= 0.00125 - 1e-12; y /= 2.0) {
      ys.push_back(y);
      vals.push_back(pi_integral(sinc_step(mu), kI * y).real());
    }
    const double lim = neville_to_zero(ys, vals);
    CHECK(std::abs(lim - std::sqrt(1.0 - mu)) < 1e-6);
  }
}

TEST_CASE("pi_product") {
  CHECK(std::abs(pi_product(sinc_step(0.0), kI) - 1.0) < 1e-15);

  // product (branch-continued) against the closed integral route
  for (const SpectralStep& s : {sinc_step(), two_step(0.5), two_step(0.9 / 1.0)}) {
    for (Complex z :
         {kI, 2.0 * kI, Complex(1.0, 1.0), Complex(0.0, 0.5), Complex(-2.0, 0.1),
          Complex(5.0, 0.2), Complex(0.3, 3.0)}) {
      CHECK(std::abs(pi_product(s, z) - pi_integral(s, z)) < 1e-6);
    }
  }

  CHECK_THROWS_AS(pi_product(sinc_step(), Complex(kPi, 1e-9)), PoleProximity);
  CHECK_THROWS_AS(pi_product(sinc_step(), Complex(0.5, -1.0)), Error);
}

TEST_CASE("boundary modulus of Pi") {
  // |Pi(lam + i eps)|^2 -> 2 pi sigma'(lam) inside each step
  const SpectralStep s = two_step(0.5);
  for (double lam : {0.9, 2.2, 4.4}) {
    std::vector<double> eps, vals;
    for (double e = 1e-2; e >= 1e-3 - 1e-15; e /= 2.0) {
      eps.push_back(e);
      const Complex p = pi_product(s, Complex(lam, e));
      vals.push_back(std::norm(p) / (2.0 * kPi * s.sigma_prime(lam)));
    }
    const double lim = neville_to_zero(eps, vals);
    CHECK(std::abs(lim - 1.0) < 1e-3);
  }
}

TEST_CASE("pi_limit") {
  {  // mu = 0: P* = 1 = Pi
    KreinTrajectory t = sweep_B(sinc_step(0.0), 10.0, 0.05);
    q_trajectories(t);
    const KreinSolution sol = integrate_krein_system(t, kI, 8);
    const SubsequencePick pick = select_subsequence(t, sol, 10.0);
    const PiLimit lim = pi_limit(t, sol, pick);
    CHECK(std::abs(lim.value - 1.0) < 1e-12);
  }

  KreinTrajectory t = sweep_B(sinc_step(), 20.0, 0.05);
  q_trajectories(t);
  const KreinSolution sol = integrate_krein_system(t, kI, 8);
  const SubsequencePick pick = select_subsequence(t, sol, 10.0);
  const PiLimit lim = pi_limit(t, sol, pick);
  CHECK(std::abs(lim.value - pi_product(sinc_step(), kI)) < 1e-2);
  CHECK(lim.spread < 1e-2);
}

TEST_CASE("g_of_xi") {
  {  // mu -> 0: q and r vanish, G -> 1
    DiscreteSection sec(sinc_step(1e-8), QuadratureGrid::panels(8.0, 8, 16));
    CHECK(std::abs(g_of_xi(sec, kI) - 1.0) < 1e-7);
  }

  {  // reconstruction w12 = e^{iz xi} G(xi, z) - conj(G(xi, conj z))
    DiscreteSection sec(sinc_step(), QuadratureGrid::panels(4.0, 4, 16));
    for (Complex z : {kI, Complex(1.0, 1.0)}) {
      const Complex rec = std::exp(kI * z * 4.0) * g_of_xi(sec, z) -
                          std::conj(g_of_xi(sec, std::conj(z)));
      CHECK(std::abs(rec - w12_inner_product(sec, z)) < 1e-10);
    }
  }

  // G(xi, -iy) stabilizes as xi doubles
  auto G = [&](double xi) {
    DiscreteSection sec(sinc_step(),
                        QuadratureGrid::panels(xi, static_cast<int>(xi), 16));
    return g_of_xi(sec, -0.5 * kI).real();
  };
  const double d1 = std::abs(G(8.0) - G(4.0));
  const double d2 = std::abs(G(16.0) - G(8.0));
  CHECK(d2 < d1);
}

TEST_CASE("boundary limits report") {
  KreinTrajectory t = sweep_B(sinc_step(), 20.0, 0.05);
  q_trajectories(t);
  const KreinSolution sol = integrate_krein_system(t, kI, 8);
  const SubsequencePick pick = select_subsequence(t, sol, 10.0);
  const BoundaryReport rep = boundary_limits(sinc_step(), t, pick, {});

  REQUIRE(rep.mobius_at_min_y.size() == 1);
  CHECK(std::abs(rep.mobius_at_min_y[0] - Complex(-1.0)) < 1e-5);
  CHECK(std::abs(rep.pi_extrapolated - std::sqrt(0.5)) < 1e-3);
  REQUIRE(!rep.q1_at_picks.empty());
  CHECK(std::abs(rep.q1_at_picks.back() - 1.0 / std::sqrt(0.5)) < 5e-2);

  // a two-interval density: the k = 1 ratio tends to +1
  const BoundaryReport rep2 = boundary_limits(two_step(), t, pick, {});
  REQUIRE(rep2.mobius_at_min_y.size() == 2);
  CHECK(std::abs(rep2.mobius_at_min_y[0] - Complex(-1.0)) < 1e-5);
  CHECK(std::abs(rep2.mobius_at_min_y[1] - Complex(1.0)) < 1e-5);
}

TEST_CASE("certificate") {
  CertificateOptions opt;
  opt.xi_max = 30.0;
  opt.delta = 0.03;

  {
    const NonFactorabilityCertificate cert = certificate(sinc_step(), opt);
    CHECK(std::abs(cert.L_fact + 2.0) < 5e-2);
    CHECK(std::abs(cert.L_true + 1.0) < 5e-2);
    CHECK(std::abs(cert.gap - 1.0) < 1e-1);
    CHECK(cert.gap_target == doctest::Approx(1.0));
    CHECK(cert.verdict == "non-factorable");
    CHECK(cert.w12_pick_defect < 5e-2);
    CHECK(cert.pi_prod.size() == cert.pi_int.size());
    for (std::size_t i = 0; i < cert.pi_prod.size(); ++i)
      CHECK(std::abs(cert.pi_prod[i] - cert.pi_int[i]) < 1e-6);
  }

  {  // identity coupling: no gap, factorable verdict
    const NonFactorabilityCertificate cert = certificate(sinc_step(0.0), opt);
    CHECK(cert.gap < 1e-6);
    CHECK(cert.verdict == "factorable (identity)");
  }

  {  // gap = mu/(1-mu) across the coupling range
    CertificateOptions fast = opt;
    fast.xi_max = 25.0;
    for (double mu : {0.25, 0.75}) {
      const NonFactorabilityCertificate cert = certificate(sinc_step(mu), fast);
      CHECK(std::abs(cert.gap - mu / (1.0 - mu)) < 1e-1 * (1.0 + cert.gap_target));
      CHECK(cert.verdict == "non-factorable");
    }
  }

  {  // a gap at the noise scale is refused rather than classified
    CertificateOptions fast = opt;
    fast.xi_max = 20.0;
    fast.delta = 0.05;
    CHECK_THROWS_AS(certificate(sinc_step(2e-6), fast), ResolutionInsufficient);
  }
}

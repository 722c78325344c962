#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kreinlab/errors.hpp"
#include "kreinlab/krein_evolution.hpp"
#include "kreinlab/toeplitz.hpp"

using namespace kreinlab;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr Complex kI(0.0, 1.0);
SpectralStep sinc_step(double mu = 0.5) { return {{0.0, kPi}, {1.0}, mu}; }

const KreinTrajectory& shared_traj() {
  static KreinTrajectory traj = [] {
    KreinTrajectory t = sweep_B(sinc_step(), 20.0, 0.05);
    q_trajectories(t);
    return t;
  }();
  return traj;
}
}  // namespace

TEST_CASE("sweep_B basics") {
  {  // mu = 0 -> B = 0
    const KreinTrajectory t = sweep_B(sinc_step(0.0), 5.0, 0.05);
    for (double b : t.B) CHECK(b == 0.0);
  }
  CHECK_THROWS_AS(sweep_B(sinc_step(1.0), 5.0, 0.05), InvalidCoupling);

  // |mu| small: B = mu h + O(mu^2), slope fit over a doubling
  std::vector<double> mus = {0.05, 0.1}, errs;
  for (double mu : mus) {
    const KreinTrajectory t = sweep_B(sinc_step(mu), 6.0, 0.05);
    double e = 0.0;
    for (std::size_t j = 0; j < t.x.size(); ++j)
      e = std::max(e, std::abs(t.B[j] - mu * t.step.h(t.x[j])));
    errs.push_back(e);
  }
  const double slope = std::log(errs[1] / errs[0]) / std::log(mus[1] / mus[0]);
  CHECK(std::abs(slope - 2.0) < 0.3);

  // raw one-level sweep equals the dense corner of the same grid
  const double delta = 0.05;
  SectionSweep raw(sinc_step(), delta, 3.0);
  for (double xs : {1.0, 2.0, 3.0}) {
    const auto n = static_cast<std::size_t>(std::llround(xs / delta));
    DiscreteSection sec(sinc_step(),
                        QuadratureGrid::uniform(xs, static_cast<int>(n) + 1));
    const Eigen::MatrixXd inv = sec.inverse_node_matrix();
    const double dense_B = inv(static_cast<Eigen::Index>(n), 0) / (delta / 2.0);
    CHECK(std::abs(raw.B()[n] - dense_B) < 1e-10);
  }
}

TEST_CASE("q trajectories and identities") {
  const KreinTrajectory& t = shared_traj();
  CHECK(t.q1_direct[0] == 1.0);
  CHECK(t.q1_exp[0] == 1.0);

  const TrajectoryDefects d = trajectory_defects(t);
  CHECK(d.q1q2 < 1e-6);
  CHECK(d.balance < 1e-6);
  CHECK(d.q1_cross < 1e-6);
  CHECK(d.q1_min > 0.0);

  double recip = 0.0;
  for (std::size_t j = 0; j < t.x.size(); ++j)
    recip = std::max(recip, std::abs(t.q2_recip[j] - t.q2_direct[j]));
  CHECK(recip < 1e-6);
}

TEST_CASE("Krein system integration") {
  {  // mu = 0: P = e^{izx}, P* = 1
    KreinTrajectory t = sweep_B(sinc_step(0.0), 5.0, 0.05);
    q_trajectories(t);
    const KreinSolution sol = integrate_krein_system(t, Complex(0.7, 0.4), 8);
    double dP = 0.0, dPs = 0.0;
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
      dP = std::max(dP, std::abs(sol.P[j] - std::exp(kI * Complex(0.7, 0.4) * sol.x[j])));
      dPs = std::max(dPs, std::abs(sol.Pstar[j] - 1.0));
    }
    CHECK(dP < 1e-10);
    CHECK(dPs == 0.0);
  }

  const KreinTrajectory& t = shared_traj();
  const KreinSolution real_probe = integrate_krein_system(t, Complex(1.0, 0.0), 8);
  CHECK(real_probe.conservation_defect() < 1e-8);

  for (Complex z : {kI, 2.0 * kI, Complex(1.0, 1.0)}) {
    const KreinSolution sol = integrate_krein_system(t, z, 8);
    CHECK(sol.identity_defect() < 1e-8);
  }

  // fourth-order step-size response of the cross-system identity
  const double d1 = integrate_krein_system(t, 2.0 * kI, 1).identity_defect();
  const double d2 = integrate_krein_system(t, 2.0 * kI, 2).identity_defect();
  CHECK(d1 / d2 > 8.0);
  CHECK(d1 / d2 < 40.0);

  // a genuinely coarse integration is rejected
  KreinTrajectory coarse = sweep_B(sinc_step(), 8.0, 0.4);
  q_trajectories(coarse);
  CHECK(coarse.coarse_warning);
  CHECK_THROWS_AS(integrate_krein_system(coarse, 2.0 * kI, 1), StepTooCoarse);
}

TEST_CASE("canonical system assembly") {
  const KreinTrajectory& t = shared_traj();

  {  // z = 0: W is the identity
    const KreinSolution sol = integrate_krein_system(t, Complex(0.0), 8);
    const CanonicalSystemState st = assemble_W(t, sol, 12.0);
    CHECK((st.W - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }

  for (Complex z : {kI, 2.0 * kI, Complex(1.0, 1.0)}) {
    const KreinSolution sol = integrate_krein_system(t, z, 8);
    const CanonicalSystemState st = assemble_W(t, sol, 20.0);
    CHECK(st.det_defect() < 1e-8);
    CHECK(st.H(0, 0) * st.H(1, 1) - 0.25 == doctest::Approx(0.0).epsilon(1e-12));
    // V(0) = I and W(0) = I
    const CanonicalSystemState at0 = assemble_W(t, sol, 0.0);
    CHECK((at0.W - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((at0.V - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }

  {  // J-unitarity along the real axis
    const KreinSolution sol = integrate_krein_system(t, Complex(1.0, 0.0), 8);
    const CanonicalSystemState st = assemble_W(t, sol, 20.0);
    CHECK(st.j_unitarity_defect() < 1e-8);
  }

  {  // assembled route vs direct integration of the 2x2 system
    const KreinSolution sol = integrate_krein_system(t, kI, 8);
    const CanonicalSystemState st = assemble_W(t, sol, 8.0);
    const Eigen::Matrix2cd direct = integrate_W_direct(t, kI, 8.0, 8);
    CHECK((st.W - direct).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("w12 three ways") {
  const KreinTrajectory& t = shared_traj();
  for (double xi : {2.0, 4.0}) {
    DiscreteSection sec(sinc_step(),
                        QuadratureGrid::panels(xi, static_cast<int>(xi), 16));
    for (Complex z : {kI, Complex(1.0, 1.0)}) {
      const Complex quad = w12_inner_product(sec, z);
      const KreinSolution sol = integrate_krein_system(t, z, 8);
      const Complex ode = w12_from_solution(t, sol, xi);
      CHECK(std::abs(quad - ode) < 1e-6);
    }
  }
  {  // z = 0 annihilates the entry
    DiscreteSection sec(sinc_step(), QuadratureGrid::panels(4.0, 4, 16));
    CHECK(std::abs(w12_inner_product(sec, Complex(0.0))) == 0.0);
  }
}

TEST_CASE("subsequence selection") {
  {  // mu = 0: score e^{-2x} is monotone, the tail qualifies
    KreinTrajectory t = sweep_B(sinc_step(0.0), 10.0, 0.05);
    q_trajectories(t);
    const KreinSolution sol = integrate_krein_system(t, kI, 8);
    const SubsequencePick pick = select_subsequence(t, sol, 10.0);
    CHECK(!pick.indices.empty());
    CHECK(pick.indices.back() == t.x.size() - 1);
    // running P-energy is monotone and saturates
    for (std::size_t j = 1; j < sol.energy.size(); ++j)
      CHECK(sol.energy[j] >= sol.energy[j - 1]);
    CHECK(sol.energy.back() - sol.energy[sol.energy.size() / 2] < 1e-4);
  }

  const KreinTrajectory& t = shared_traj();
  const KreinSolution sol = integrate_krein_system(t, kI, 8);
  const SubsequencePick pick = select_subsequence(t, sol, 10.0);
  CHECK(pick.indices.size() >= 3);
  for (std::size_t i = 1; i < pick.scores.size(); ++i) {
    CHECK(pick.scores[i] < pick.scores[i - 1]);
    CHECK(pick.indices[i] > pick.indices[i - 1]);
  }
  for (double s : pick.scores) CHECK(s <= pick.threshold);

  {  // increasing score profile leaves nothing below the threshold
    KreinTrajectory fake;
    fake.step = sinc_step(0.0);
    fake.delta = 0.1;
    fake.xi_max = 1.0;
    fake.x = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    fake.Q.assign(11, 0.0);
    KreinSolution s;
    s.z = kI;
    s.x = fake.x;
    s.P.resize(11);
    s.Pstar.assign(11, Complex(1.0));
    s.energy.assign(11, 0.0);
    for (int j = 0; j <= 10; ++j) s.P[j] = Complex(0.1 * j + 0.05, 0.0);
    CHECK_THROWS_AS(select_subsequence(fake, s, 10.0), NoQualifyingPoints);
  }
}

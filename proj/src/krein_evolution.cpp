#include "kreinlab/krein_evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "kreinlab/errors.hpp"
#include "kreinlab/toeplitz.hpp"

namespace kreinlab {

namespace {

constexpr double kPi = std::numbers::pi;

// two-level Richardson for an even-power error expansion
std::vector<double> richardson2(const std::vector<double>& coarse,
                                const std::vector<double>& mid,
                                const std::vector<double>& fine) {
  std::vector<double> r1(coarse.size()), r1m(mid.size()), out(coarse.size());
  for (std::size_t j = 0; j < coarse.size(); ++j)
    r1[j] = (4.0 * mid[2 * j] - coarse[j]) / 3.0;
  for (std::size_t j = 0; j < mid.size(); ++j)
    r1m[j] = (4.0 * fine[2 * j] - mid[j]) / 3.0;
  for (std::size_t j = 0; j < coarse.size(); ++j)
    out[j] = (16.0 * r1m[2 * j] - r1[j]) / 15.0;
  return out;
}

// 4-point Gauss-Legendre on [a, b]
template <typename F>
double gl4(F&& f, double a, double b) {
  static const double xg[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
  static const double wg[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += wg[i] * f(c + h * xg[i]);
  return h * s;
}

}  // namespace

std::size_t KreinTrajectory::index_of(double xv) const {
  const auto j = static_cast<std::size_t>(std::llround(xv / delta));
  if (j >= x.size() || std::abs(x[j] - xv) > 1e-9 * std::max(1.0, std::abs(xv)))
    throw Error("requested x does not sit on the trajectory grid");
  return j;
}

double KreinTrajectory::B_at(double xv) const {
  return lagrange_uniform(B, 0.0, delta, std::clamp(xv, 0.0, xi_max));
}

double KreinTrajectory::int_B_at(double xv) const {
  xv = std::clamp(xv, 0.0, xi_max);
  const auto j = std::min(static_cast<std::size_t>(xv / delta), int_B.size() - 1);
  const double xj = static_cast<double>(j) * delta;
  if (xv <= xj) return int_B[j];
  return int_B[j] + gl4([this](double t) { return B_at(t); }, xj, xv);
}

double KreinTrajectory::q1_at(double xv) const { return std::exp(int_B_at(xv)); }

KreinTrajectory sweep_B(const SpectralStep& step, double xi_max, double delta) {
  step.validate();
  if (step.mu == 0.0) {
    // identity operator: the sweep is trivial but the grid is still useful
    KreinTrajectory traj;
    traj.step = step;
    traj.delta = delta;
    traj.xi_max = xi_max;
    const std::size_t N = static_cast<std::size_t>(std::llround(xi_max / delta)) + 1;
    traj.x.resize(N);
    for (std::size_t j = 0; j < N; ++j) traj.x[j] = static_cast<double>(j) * delta;
    traj.B.assign(N, 0.0);
    traj.q1_direct.assign(N, 1.0);
    traj.q2_direct.assign(N, 0.5);
    traj.Q.assign(N, 0.0);
    return traj;
  }

  KreinTrajectory traj;
  traj.step = step;
  traj.delta = delta;
  traj.xi_max = xi_max;
  traj.coarse_warning = delta * step.a_max() > kPi / 4.0;

  SectionSweep coarse(step, delta, xi_max);
  SectionSweep mid(step, delta / 2.0, xi_max);
  SectionSweep fine(step, delta / 4.0, xi_max);

  traj.x = coarse.x();
  traj.B = richardson2(coarse.B(), mid.B(), fine.B());
  traj.q1_direct = richardson2(coarse.q1(), mid.q1(), fine.q1());
  traj.q2_direct = richardson2(coarse.q2(), mid.q2(), fine.q2());
  traj.Q = richardson2(coarse.Q(), mid.Q(), fine.Q());
  // zero-length section values are exact at every level
  traj.q1_direct[0] = 1.0;
  traj.q2_direct[0] = step.M(0.0);
  traj.Q[0] = step.q(0.0);
  return traj;
}

void q_trajectories(KreinTrajectory& traj) {
  if (traj.B.empty()) throw Error("q_trajectories: run sweep_B first");
  const std::size_t N = traj.x.size();
  traj.int_B.assign(N, 0.0);
  for (std::size_t j = 1; j < N; ++j)
    traj.int_B[j] = traj.int_B[j - 1] +
                    gl4([&traj](double t) { return traj.B_at(t); }, traj.x[j - 1],
                        traj.x[j]);
  traj.q1_exp.resize(N);
  traj.q2_recip.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    traj.q1_exp[j] = std::exp(traj.int_B[j]);
    traj.q2_recip[j] = 0.5 / traj.q1_exp[j];
  }
}

TrajectoryDefects trajectory_defects(const KreinTrajectory& traj) {
  TrajectoryDefects d{0.0, 0.0, 0.0, 0.0, traj.q1_direct[0]};
  const double mu = traj.step.mu;
  for (std::size_t j = 0; j < traj.x.size(); ++j) {
    const double q1 = traj.q1_direct[j];
    const double q2 = traj.q2_direct[j];
    d.q1q2 = std::max(d.q1q2, std::abs(q1 * q2 - 0.5));
    d.balance = std::max(
        d.balance, std::abs(0.5 - q1 * q1 * (1.0 - mu) / 2.0 - q1 * traj.Q[j]));
    if (!traj.q1_exp.empty())
      d.q1_cross = std::max(d.q1_cross, std::abs(traj.q1_exp[j] - q1));
    d.q1_min = std::min(d.q1_min, q1);
  }
  d.q1_at_zero = std::abs(traj.q1_direct[0] - 1.0);
  return d;
}

namespace {

// joint state: P, P*, Phi1, Psi1, Phi2, Psi2, int B, int |P|^2
using State = std::array<Complex, 8>;

State system_rhs(const KreinTrajectory& traj, Complex z, double x, const State& s) {
  const double Bv = traj.B_at(x);
  State d;
  d[0] = Complex(0.0, 1.0) * z * s[0] + Bv * s[1];  // P'  = izP + B P*
  d[1] = Bv * s[0];                                 // P*' = B P
  d[2] = 0.5 * z * s[3] + Bv * s[2];                // Phi1'
  d[3] = -0.5 * z * s[2] - Bv * s[3];               // Psi1'
  d[4] = 0.5 * z * s[5] + Bv * s[4];                // Phi2'
  d[5] = -0.5 * z * s[4] - Bv * s[5];               // Psi2'
  d[6] = Bv;                                        // int B
  d[7] = std::norm(s[0]);                           // int |P|^2
  return d;
}

State rk4_step(const KreinTrajectory& traj, Complex z, double x, double h,
               const State& s) {
  auto axpy = [](const State& a, double c, const State& b) {
    State r;
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
    return r;
  };
  const State k1 = system_rhs(traj, z, x, s);
  const State k2 = system_rhs(traj, z, x + h / 2, axpy(s, h / 2, k1));
  const State k3 = system_rhs(traj, z, x + h / 2, axpy(s, h / 2, k2));
  const State k4 = system_rhs(traj, z, x + h, axpy(s, h, k3));
  State out = s;
  for (std::size_t i = 0; i < s.size(); ++i)
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

KreinSolution integrate_krein_system(const KreinTrajectory& traj, Complex z,
                                     int substeps) {
  if (traj.B.empty()) throw Error("integrate_krein_system: run sweep_B first");
  if (substeps < 1) substeps = 1;
  const std::size_t N = traj.x.size();
  const double h = traj.delta / substeps;

  KreinSolution sol;
  sol.z = z;
  sol.x = traj.x;
  sol.P.resize(N);
  sol.Pstar.resize(N);
  sol.Phi1.resize(N);
  sol.Phi2.resize(N);
  sol.Psi1.resize(N);
  sol.Psi2.resize(N);
  sol.energy.resize(N);

  State s{Complex(1.0), Complex(1.0), Complex(1.0), Complex(0.0, 1.0),
          Complex(1.0), Complex(0.0, -1.0), Complex(0.0), Complex(0.0)};

  // embedded coarseness check on the first cell
  {
    const State one = rk4_step(traj, z, 0.0, traj.delta, s);
    State two = rk4_step(traj, z, 0.0, traj.delta / 2.0, s);
    two = rk4_step(traj, z, traj.delta / 2.0, traj.delta / 2.0, two);
    double err = 0.0;
    for (std::size_t i = 0; i < 6; ++i) err = std::max(err, std::abs(one[i] - two[i]));
    if (err * static_cast<double>(N) > 1e-6 * substeps * substeps * substeps * substeps)
      throw StepTooCoarse("local integration error exceeds the budget");
  }

  auto record = [&](std::size_t j) {
    sol.P[j] = s[0];
    sol.Pstar[j] = s[1];
    sol.Phi1[j] = s[2];
    sol.Psi1[j] = s[3];
    sol.Phi2[j] = s[4];
    sol.Psi2[j] = s[5];
    sol.energy[j] = s[7].real();
  };
  record(0);
  for (std::size_t j = 1; j < N; ++j) {
    double x = traj.x[j - 1];
    for (int m = 0; m < substeps; ++m) {
      s = rk4_step(traj, z, x, h, s);
      x += h;
    }
    record(j);
  }
  return sol;
}

double KreinSolution::identity_defect() const {
  double d = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const Complex psi = Psi1[j] + Psi2[j];
    const Complex rhs = -Complex(0.0, 1.0) * std::exp(Complex(0.0, 0.5) * z * x[j]) * psi;
    d = std::max(d, std::abs(P[j] - Pstar[j] - rhs));
  }
  return d;
}

double KreinSolution::conservation_defect() const {
  double d = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    d = std::max(d, std::abs(std::abs(P[j]) - std::abs(Pstar[j])));
  return d;
}

CanonicalSystemState assemble_W(const KreinTrajectory& traj,
                                const KreinSolution& sol, double x) {
  const std::size_t j = traj.index_of(x);
  if (traj.int_B.empty())
    throw Error("assemble_W: q_trajectories must fill the exponential route first");

  CanonicalSystemState st;
  st.z = sol.z;
  st.x = x;
  const double q1 = std::exp(traj.int_B[j]);
  const double q2 = 0.5 / q1;

  st.T << q1, -q1, q2, q2;
  st.T0 << 1.0, -1.0, 0.5, 0.5;
  st.T0inv << 0.5, 1.0, -0.5, 1.0;
  st.H << q2 * q2, 0.5, 0.5, q1 * q1;
  st.Gamma << 0.0, traj.B[j], traj.B[j], 0.0;
  st.J << 0.0, 1.0, 1.0, 0.0;
  st.jsig << 1.0, 0.0, 0.0, -1.0;
  st.Pproj << 1.0, 0.0, 0.0, 0.0;

  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd mid;
  mid << sol.Phi1[j] - i * sol.Psi1[j], sol.Phi2[j] - i * sol.Psi2[j],
      sol.Phi1[j] + i * sol.Psi1[j], sol.Phi2[j] + i * sol.Psi2[j];
  const Complex phase = std::exp(Complex(0.0, 0.5) * sol.z * x);
  st.W = 0.5 * phase * st.T.cast<Complex>() * mid * st.T0inv.cast<Complex>();

  Eigen::Matrix2cd Tinv;
  Tinv << q2, q1, -q2, q1;  // T^{-1} = (1/(2 q1 q2)) [[q2, q1], [-q2, q1]], 2 q1 q2 = 1
  st.V = (1.0 / phase) * Tinv * st.W * st.T0.cast<Complex>();
  return st;
}

double CanonicalSystemState::det_defect() const {
  return std::abs(W.determinant() - std::exp(Complex(0.0, 1.0) * z * x));
}

double CanonicalSystemState::j_unitarity_defect() const {
  const Eigen::Matrix2cd lhs = W.adjoint() * J.cast<Complex>() * W;
  return (lhs - J.cast<Complex>()).cwiseAbs().maxCoeff();
}

Eigen::Matrix2cd integrate_W_direct(const KreinTrajectory& traj, Complex z,
                                    double x, int substeps) {
  if (traj.int_B.empty())
    throw Error("integrate_W_direct: q_trajectories must run first");
  const std::size_t jend = traj.index_of(x);
  const double h = traj.delta / substeps;
  Eigen::Matrix2cd W = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2d J;
  J << 0.0, 1.0, 1.0, 0.0;

  auto rhs = [&](double t, const Eigen::Matrix2cd& Wv) -> Eigen::Matrix2cd {
    const double q1 = traj.q1_at(t);
    const double q2 = 0.5 / q1;
    Eigen::Matrix2d H;
    H << q2 * q2, 0.5, 0.5, q1 * q1;
    return Complex(0.0, 1.0) * z * (J * H).cast<Complex>() * Wv;
  };

  for (std::size_t j = 0; j < jend; ++j) {
    double t = traj.x[j];
    for (int m = 0; m < substeps; ++m) {
      const Eigen::Matrix2cd k1 = rhs(t, W);
      const Eigen::Matrix2cd k2 = rhs(t + h / 2, W + h / 2 * k1);
      const Eigen::Matrix2cd k3 = rhs(t + h / 2, W + h / 2 * k2);
      const Eigen::Matrix2cd k4 = rhs(t + h, W + h * k3);
      W += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
    }
  }
  return W;
}

Complex w12_inner_product(const DiscreteSection& section, Complex z) {
  const auto n = static_cast<Eigen::Index>(section.size());
  Eigen::VectorXd u = section.solve(Eigen::VectorXd::Ones(n));
  Complex acc(0.0);
  const auto& grid = section.grid();
  for (Eigen::Index k = 0; k < n; ++k)
    acc += grid.weights[k] * std::exp(Complex(0.0, 1.0) * z * grid.nodes[k]) * u(k);
  return Complex(0.0, 1.0) * z * acc;
}

Complex w12_from_solution(const KreinTrajectory& traj, const KreinSolution& sol,
                          double x) {
  const std::size_t j = traj.index_of(x);
  const double q1 = traj.int_B.empty() ? traj.q1_direct[j] : std::exp(traj.int_B[j]);
  return q1 * (sol.P[j] - sol.Pstar[j]);
}

SubsequencePick select_subsequence(const KreinTrajectory& traj,
                                   const KreinSolution& sol, double percentile) {
  if (!(sol.z.imag() > 0.0))
    throw Error("subsequence probe needs Im z0 > 0");
  const std::size_t N = traj.x.size();
  std::vector<double> s(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double Qv = traj.Q.empty() ? 0.0 : traj.Q[j];
    s[j] = Qv * Qv + std::norm(sol.P[j]);
  }

  // threshold: percentile of the score over the last quarter of the range
  std::vector<double> tail(s.begin() + static_cast<long>(3 * N / 4), s.end());
  std::sort(tail.begin(), tail.end());
  const double frac = std::clamp(percentile / 100.0, 0.0, 1.0);
  const double threshold =
      tail[static_cast<std::size_t>(frac * static_cast<double>(tail.size() - 1))];

  SubsequencePick pick;
  pick.z0 = sol.z;
  pick.threshold = threshold;
  pick.energy = sol.energy;

  std::vector<std::size_t> candidates;
  for (std::size_t j = 1; j + 1 < N; ++j)
    if (s[j] < s[j - 1] && s[j] < s[j + 1] && s[j] <= threshold)
      candidates.push_back(j);
  // monotone scores admit no interior minimum; the tail point qualifies
  if (s[N - 1] <= threshold) candidates.push_back(N - 1);
  if (candidates.empty())
    throw NoQualifyingPoints("no score fell below the threshold; enlarge xi_max");

  // keep the chain strictly decreasing in score while anchored at the tail,
  // so the final picks sit deep in the range
  double last_kept = -1.0;
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    if (last_kept < 0.0 || s[*it] > last_kept) {
      pick.indices.push_back(*it);
      pick.scores.push_back(s[*it]);
      last_kept = s[*it];
    }
  }
  std::reverse(pick.indices.begin(), pick.indices.end());
  std::reverse(pick.scores.begin(), pick.scores.end());
  return pick;
}

}  // namespace kreinlab

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

#include "kreinlab/finite_section.hpp"
#include "kreinlab/numerics.hpp"
#include "kreinlab/spectral_step.hpp"

namespace kreinlab {

// x-grid sweep of the accelerant B(x) = R_x(x, 0, mu) and the derived
// trajectories.  B, q1_direct, q2_direct and Q come from growing-section
// sweeps at delta, delta/2 and delta/4 combined by two Richardson steps
// (the trapezoid Nystrom error expands in even powers of the spacing), so
// the stored values carry O(delta^6) discretization error on the delta
// grid.  q1_exp integrates the Krein identity q1 = exp(int_0^x B).
struct KreinTrajectory {
  SpectralStep step;
  double delta = 0.0;
  double xi_max = 0.0;
  bool coarse_warning = false;  // delta * a_n > pi/4

  std::vector<double> x;
  std::vector<double> B;
  std::vector<double> q1_exp, q1_direct, q2_direct, q2_recip, Q;
  std::vector<double> int_B;  // int_0^{x_j} B

  bool q_filled() const { return !q1_exp.empty(); }
  std::size_t index_of(double xv) const;  // nearest grid index, x must sit on the grid

  double B_at(double xv) const;      // order-8 interpolation of the B grid
  double int_B_at(double xv) const;  // grid value + in-cell Gauss-Legendre tail
  double q1_at(double xv) const;     // exp(int_B_at)
};

// Runs the three-level sweeps: fills x, B and the direct-route arrays
// q1_direct, q2_direct, Q that fall out of the same Levinson pass.
KreinTrajectory sweep_B(const SpectralStep& step, double xi_max, double delta);

// Completes the q trajectories: int_B, the exponential route q1_exp and the
// reciprocal q2_recip = 1/(2 q1_exp).
void q_trajectories(KreinTrajectory& traj);

// Trajectory identity defects, all testable from the stored arrays:
//   q1 q2 = 1/2,   1/2 = q1^2 (1-mu)/2 + q1 Q,   q1(0) = 1,  q1 > 0,
//   cross-method agreement of the two q1 routes.
struct TrajectoryDefects {
  double q1q2;        // max |q1 q2 - 1/2|
  double balance;     // max |1/2 - q1^2 (1-mu)/2 - q1 Q|
  double q1_cross;    // max |q1_exp - q1_direct|
  double q1_at_zero;  // |q1(0) - 1|
  double q1_min;      // min q1 (positivity)
};
TrajectoryDefects trajectory_defects(const KreinTrajectory& traj);

// Solution of the Krein system driven by B together with the Phi/Psi pair,
// integrated independently so the algebraic link between them stays a
// genuine cross-check:
//
//   P'     = i z P + B P*            P(0)  = P*(0) = 1
//   P*'    = B P
//   Phi_n' = (z/2) Psi_n + B Phi_n   Phi_1(0) = Phi_2(0) = 1
//   Psi_n' = -(z/2) Phi_n - B Psi_n  Psi_1(0) = -Psi_2(0) = i
//
// along which  P - P* = -i e^{ixz/2} (Psi_1 + Psi_2)  and, for real z,
// |P| = |P*| (conservation).  For Im z > 0 the Phi/Psi components grow
// like e^{|Im z| x / 2}; P and P* stay bounded.
struct KreinSolution {
  Complex z;
  std::vector<double> x;
  std::vector<Complex> P, Pstar, Phi1, Phi2, Psi1, Psi2;
  std::vector<double> energy;  // running int_0^x |P|^2

  double identity_defect() const;      // max |(P - P*) + i e^{ixz/2} Psi|
  double conservation_defect() const;  // max ||P| - |P*||
};

// Classical fourth-order one-step integration on the B grid; `substeps`
// sub-intervals per grid cell.  Throws StepTooCoarse when the embedded
// step-halving estimate exceeds the error budget.
KreinSolution integrate_krein_system(const KreinTrajectory& traj, Complex z,
                                     int substeps = 8);

// Monodromy data of the 2x2 canonical system W' = i z J H(x) W at (x, z):
// W assembled from the Phi/Psi solution through
//   W = (1/2) e^{ixz/2} T(x) [Phi_n - i Psi_n ; Phi_n + i Psi_n] T(0)^{-1},
// T(x) = [[q1, -q1], [q2, q2]] with q2 = 1/(2 q1) and q1 = exp(int B).
struct CanonicalSystemState {
  Complex z;
  double x = 0.0;
  Eigen::Matrix2cd W;  // assembled monodromy
  Eigen::Matrix2cd V;  // e^{-ixz/2} T^{-1} W T(0)
  Eigen::Matrix2d H;       // [[q2^2, 1/2], [1/2, q1^2]]
  Eigen::Matrix2d Gamma;   // [[0, B], [B, 0]]
  Eigen::Matrix2d J;       // [[0,1],[1,0]]
  Eigen::Matrix2d jsig;    // diag(1, -1)
  Eigen::Matrix2d Pproj;   // diag(1, 0)
  Eigen::Matrix2d T, T0, T0inv;

  double det_defect() const;         // |det W - e^{ixz}|
  double j_unitarity_defect() const; // ||W^* J W - J||, meaningful for real z
};

CanonicalSystemState assemble_W(const KreinTrajectory& traj,
                                const KreinSolution& sol, double x);

// Direct RK4 integration of W' = i z J H(x) W with H from the trajectory's
// q1 = exp(int B); cross-check for the assembled route.
Eigen::Matrix2cd integrate_W_direct(const KreinTrajectory& traj, Complex z,
                                    double x, int substeps = 8);

// w12(xi, z) = i z int_0^xi e^{izx} (S_xi^{-1} 1)(x) dx  (the (1,2) entry
// of the monodromy, computed without the differential system).
Complex w12_inner_product(const DiscreteSection& section, Complex z);

// Same entry from the trajectory side: w12(x, z) = q1(x) (P - P*)(x, z).
Complex w12_from_solution(const KreinTrajectory& traj, const KreinSolution& sol,
                          double x);

// "Almost sure" subsequence: strict local minima of
// s(x) = |Q(x)|^2 + |P(x, z0)|^2 below a percentile threshold, filtered so
// the picked scores decrease; the tail point joins when it qualifies.
struct SubsequencePick {
  Complex z0;
  double threshold = 0.0;
  std::vector<std::size_t> indices;  // ascending
  std::vector<double> scores;        // strictly decreasing
  std::vector<double> energy;        // running P-energy at grid points
};

SubsequencePick select_subsequence(const KreinTrajectory& traj,
                                   const KreinSolution& sol,
                                   double percentile = 10.0);

}  // namespace kreinlab

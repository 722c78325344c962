#pragma once

#include <complex>
#include <string>
#include <vector>

#include "kreinlab/finite_section.hpp"
#include "kreinlab/krein_evolution.hpp"
#include "kreinlab/spectral_step.hpp"

namespace kreinlab {

// The limit function Pi(z) of the Krein solution, Im z > 0, normalized so
// that Pi(iy) -> sqrt(1 - mu) as y -> 0+.  Three independent routes:
//
//   pi_integral  exact piecewise evaluation of the outer-function integral
//                exp{(1/2 pi i) int (1+tz)/((t-z)(1+t^2)) log(1 - mu rho(t)) dt};
//                the integrand's log is piecewise constant, so every piece
//                reduces to principal logarithms of the endpoints (all
//                arguments stay in the closed lower half-plane).
//
//   pi_product   the same function as a finite product of Moebius-ratio
//                powers, each factor's logarithm continued numerically
//                along the segment from the anchor z = i (where the value
//                is forced to agree with pi_integral) to the target.
//
//   pi_limit     the trajectory-side limit from P*(x_n, z) along the
//                selected subsequence.
Complex pi_integral(const SpectralStep& step, Complex z);

// Quadrature oracle for pi_integral (tan substitution, Gauss-Legendre per
// smooth piece).
Complex pi_integral_quadrature(const SpectralStep& step, Complex z,
                               int order = 64);

// Literal sigma'-form of the same integral: the constant log(2 pi) part
// splits off as the factor sqrt(2 pi) that cancels the prefactor.
Complex pi_integral_sigma_form(const SpectralStep& step, Complex z);

Complex pi_product(const SpectralStep& step, Complex z);

struct PiLimit {
  Complex value;          // limit estimate at the last pick
  double spread = 0.0;    // spread over the last three picks
  std::vector<Complex> tail;  // estimates at the last (up to) three picks
};

// Limit of the Krein solution along the picked subsequence.  P*(x_n, z)
// converges to the reciprocal of the boundary-normalized outer function,
// so the returned estimate is 1/P*(x_n, z) at the final picks.
PiLimit pi_limit(const KreinTrajectory& traj, const KreinSolution& sol,
                 const SubsequencePick& pick);

// G(xi, z) = [1 - i z int_0^xi e^{-izx} r_xi(x) dx] / (1 - mu) with
// r_xi = S_xi^{-1} q.  Reconstructs w12 via
//   w12(xi, z) = e^{iz xi} G(xi, z) - conj(G(xi, conj z)).
Complex g_of_xi(const DiscreteSection& section, Complex z);

struct BoundaryReport {
  std::vector<double> y_grid;
  // Moebius ratio ((a_{k+1} - iy)/(a_{k+1} + iy)) ((a_k + iy)/(a_k - iy))
  // at the smallest y, one entry per k = 0..n-1 (k = 0 tends to -1, the
  // rest to +1).
  std::vector<Complex> mobius_at_min_y;
  std::vector<Complex> pi_on_y_grid;     // Pi(iy)
  double pi_extrapolated = 0.0;          // y -> 0 limit of Pi(iy)
  double pi_target = 0.0;                // sqrt(1 - mu)
  std::vector<double> q1_at_picks;
  double q1_target = 0.0;                // 1/sqrt(1 - mu)
};

BoundaryReport boundary_limits(const SpectralStep& step,
                               const KreinTrajectory& traj,
                               const SubsequencePick& pick,
                               const std::vector<double>& y_grid);

struct CertificateOptions {
  double xi_max = 40.0;
  double delta = 0.025;
  std::vector<Complex> probes = {{0.0, 1.0}, {0.0, 2.0}, {1.0, 1.0}, {0.0, 0.5}};
  std::vector<double> y_grid;   // default geometric 1 .. 1e-3
  double percentile = 10.0;
  int substeps = 8;
  double panel_length = 1.0;
  int panel_order = 16;
};

// Everything the verdict rests on.  L_fact extrapolates the value a
// triangular factorization would force on lim w12 (through G); L_true
// extrapolates -C Pi(iy).  Both are computed, their gap is compared with
// mu/(1-mu), and the verdict requires separation from the numerical
// resolution.
struct NonFactorabilityCertificate {
  double mu = 0.0;
  double C = 0.0;  // 1/sqrt(1-mu)
  std::vector<Complex> probes;
  std::vector<Complex> pi_prod, pi_int, pi_lim;
  std::vector<double> pi_lim_spread;
  std::vector<Complex> G_at_xi_max;  // per probe
  std::vector<double> y_grid;
  std::vector<Complex> c_pi;   // C * Pi(iy) per y
  std::vector<Complex> g_bar;  // conj(G(xi_max, -iy)) per y
  double L_fact = 0.0;   // -extrapolated g_bar
  double L_true = 0.0;   // -extrapolated c_pi
  double gap = 0.0;
  double gap_target = 0.0;  // mu/(1-mu)
  double resolution = 0.0;
  // |w12(x_n, i y0) + C / Pi(i y0)| at y0 = 0.5 and the best pick; the
  // asymptotics pair w12 with -C lim P* = -C / Pi.
  double w12_pick_defect = 0.0;
  std::string verdict;

  bool non_factorable() const { return verdict == "non-factorable"; }
};

NonFactorabilityCertificate certificate(const SpectralStep& step,
                                        const CertificateOptions& opt = {});

}  // namespace kreinlab

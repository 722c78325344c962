#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "kreinlab/quadrature.hpp"
#include "kreinlab/spectral_step.hpp"

namespace kreinlab {

enum class SolveMethod { Dense, Levinson };

struct IdentityReport {
  std::string name;
  double defect = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// Node values of the resolvent kernel R_xi(x, t, mu) of a finite section,
// where S_xi^{-1} = I + R.  Carries enough of the problem to evaluate the
// kernel off the grid through the Nystrom extension
//   R(x, t) = mu h(x-t) + mu sum_k w_k h(x - x_k) R(x_k, t).
struct ResolventSection {
  SpectralStep step;
  double xi = 0.0;
  std::vector<double> nodes, weights;
  Eigen::MatrixXd values;  // R(x_i, x_j)
  double corner = 0.0;     // R(xi, 0)
  double diag_corner = 0.0;  // R(xi, xi)

  double eval(double x, double t) const;
  double symmetry_defect() const;     // max |R(x,t) - R(t,x)|
  double persymmetry_defect() const;  // max |R(xi-x, xi-t) - R(x,t)|
};

// Discretized finite section S_xi = I - mu H_xi in symmetric Nystrom form
// I - mu W^{1/2} K W^{1/2}.  Under the uniform scheme only the Toeplitz
// first row of K is stored; the dense symmetric matrix is materialized
// lazily (eigen bounds, resolvent extraction, dense solves).
class DiscreteSection {
 public:
  DiscreteSection(SpectralStep step, QuadratureGrid grid);

  const SpectralStep& step() const { return step_; }
  const QuadratureGrid& grid() const { return grid_; }
  double mu() const { return step_.mu; }
  std::size_t size() const { return grid_.size(); }

  // Node values of S u (trapezoid/panel quadrature applied to the kernel).
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  // Fast Toeplitz matvec path; uniform scheme only.
  Eigen::VectorXd apply_toeplitz(const Eigen::VectorXd& v) const;

  // Node values of S^{-1} f.  Levinson requires the uniform scheme.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs,
                        SolveMethod method = SolveMethod::Dense) const;

  ResolventSection resolvent() const;

  // (delta_est, Delta_est): extreme eigenvalues of the symmetrized matrix.
  std::pair<double, double> spectrum_bounds() const;

  const Eigen::MatrixXd& symmetrized() const;  // I - mu W^{1/2} K W^{1/2}
  Eigen::MatrixXd inverse_node_matrix() const;  // A^{-1}, A = I - mu K W

 private:
  const Eigen::LLT<Eigen::MatrixXd>& llt() const;

  SpectralStep step_;
  QuadratureGrid grid_;
  std::vector<double> toeplitz_row_;  // kernel first row, uniform scheme
  mutable Eigen::MatrixXd sym_;
  mutable std::unique_ptr<Eigen::LLT<Eigen::MatrixXd>> llt_;
};

// r_xi = S_xi^{-1} q as node values; requires 0 < mu < 1.
Eigen::VectorXd r_xi_solve(const DiscreteSection& section,
                           SolveMethod method = SolveMethod::Dense);

// Finite-interval identity suite:
//   S_xi 1        = M(x) + M(xi - x)
//   S_xi^{-1} 1   = [1 - r_xi - U_xi r_xi] / (1 - mu)
//   resolvent symmetry / persymmetry
//   eigenvalue range within [1 - mu - eps, 1 + mu + eps]
std::vector<IdentityReport> section_identities(const DiscreteSection& section);

// Relative sup-norm defect of the triangular factorization identity
//   S_b^{-1} = (I + V_+)(I + V_-),
// where row x of V_- integrates the sub-section resolvent,
// (V_- f)(x) = int_0^x R_x(x,t) f(t) dt, and V_+ is the adjoint.  Rows come
// from the Levinson sweep; the two boundary diagonal entries carry half
// quadrature weight so the composed trapezoid rule stays second order.
// Uniform scheme only.
double krein_factorization_check(const DiscreteSection& section);

// Entries of V_- above the diagonal are exactly zero by construction; this
// returns the V_- matrix (node-value convention, weights folded in) for
// direct inspection in tests.
Eigen::MatrixXd lower_factor_matrix(const DiscreteSection& section);

}  // namespace kreinlab

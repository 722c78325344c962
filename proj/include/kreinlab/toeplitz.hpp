#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kreinlab/spectral_step.hpp"

namespace kreinlab {

// Levinson recursion for the growing family of symmetric positive definite
// Toeplitz matrices T_n with first column t_0, t_1, ..., t_{n-1}.
//
// State after n steps:
//   a      monic forward filter, T_n a = E e_1, a[0] = 1
//   E      prediction error (> 0 while T_n is positive definite)
//   x_r    tracked solutions T_n x_r = b_r for registered right-hand sides
//
// Each growth step costs O(n); a full pass to size N costs O(N^2).
class LevinsonEngine {
 public:
  explicit LevinsonEngine(double t0);

  // Register a right-hand side; b0 is its first entry. Returns a slot id.
  int track(double b0);

  // Append the next first-column entry t_new and the next entry of every
  // tracked right-hand side (in slot order).  Throws NotPositiveDefinite
  // when the prediction error collapses.
  void grow(double t_new, std::span<const double> b_new);

  std::size_t size() const { return a_.size(); }
  double prediction_error() const { return energy_; }
  const std::vector<double>& filter() const { return a_; }
  const std::vector<double>& solution(int slot) const { return sols_[slot]; }

 private:
  std::vector<double> t_;
  std::vector<double> a_;
  std::vector<double> scratch_;
  double energy_;
  std::vector<std::vector<double>> sols_;
};

// One-shot solve of T x = rhs for a symmetric positive definite Toeplitz
// matrix given by its first column. O(N^2) time, O(N) extra space.
std::vector<double> toeplitz_solve(std::span<const double> first_col,
                                   std::span<const double> rhs);

// Growing-section sweep over [0, xi_max] on the uniform trapezoid grid
// x_j = j*delta.  Section m (nodes x_0..x_m) carries the Nystrom matrix
//
//   A = T + (mu delta / 2)(K e_first e_first^T + K e_last e_last^T),
//   T = I - mu delta K,   K_ij = h(x_i - x_j),
//
// i.e. a rank-2 trapezoid endpoint correction of a Toeplitz matrix, which
// the sweep resolves with the Sherman-Morrison-Woodbury identity on top of
// the Levinson state.  Per section it extracts
//
//   B(x_m)  = corner resolvent value R_{x_m}(x_m, 0)
//   q1(x_m) = (A^{-1} 1)_last
//   q2(x_m) = (A^{-1} M)_last
//   Q(x_m)  = (A^{-1} q)_last = q2 - (1-mu)/2 q1
//
// in a single O(N^2) pass.  x = 0 is filled with the exact zero-length
// section limits (B = mu h(0), q1 = 1, q2 = M(0), Q = q(0)).
class SectionSweep {
 public:
  SectionSweep(const SpectralStep& step, double delta, double xi_max,
               bool keep_rows = false);

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& B() const { return B_; }
  const std::vector<double>& q1() const { return q1_; }
  const std::vector<double>& q2() const { return q2_; }
  const std::vector<double>& Q() const { return Q_; }
  double delta() const { return delta_; }

  // Last row of A_m^{-1} for section m >= 1 (only when keep_rows was set).
  // rows()[m-1] has length m+1.
  const std::vector<std::vector<double>>& rows() const { return rows_; }

 private:
  double delta_;
  std::vector<double> x_, B_, q1_, q2_, Q_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace kreinlab

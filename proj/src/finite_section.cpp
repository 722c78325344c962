#include "kreinlab/finite_section.hpp"

#include <algorithm>
#include <cmath>

#include "kreinlab/errors.hpp"
#include "kreinlab/toeplitz.hpp"

namespace kreinlab {

DiscreteSection::DiscreteSection(SpectralStep step, QuadratureGrid grid)
    : step_(std::move(step)), grid_(std::move(grid)) {
  step_.validate();
  grid_.validate();
  if (!(std::abs(step_.mu) < 1.0))
    throw InvalidCoupling("finite section requires |mu| < 1");
  if (grid_.scheme == QuadratureGrid::Scheme::UniformTrapezoid) {
    toeplitz_row_.resize(grid_.size());
    for (std::size_t j = 0; j < grid_.size(); ++j)
      toeplitz_row_[j] = step_.h(static_cast<double>(j) * grid_.step);
  }
}

const Eigen::MatrixXd& DiscreteSection::symmetrized() const {
  if (sym_.size() == 0) {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    sym_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double k = step_.h(grid_.nodes[i] - grid_.nodes[j]);
        const double v = (i == j ? 1.0 : 0.0) -
                         step_.mu * std::sqrt(grid_.weights[i] * grid_.weights[j]) * k;
        sym_(i, j) = v;
        sym_(j, i) = v;
      }
    }
  }
  return sym_;
}

const Eigen::LLT<Eigen::MatrixXd>& DiscreteSection::llt() const {
  if (!llt_) {
    llt_ = std::make_unique<Eigen::LLT<Eigen::MatrixXd>>(symmetrized());
    if (llt_->info() != Eigen::Success)
      throw NotPositiveDefinite("symmetrized section failed Cholesky");
  }
  return *llt_;
}

Eigen::VectorXd DiscreteSection::apply(const Eigen::VectorXd& v) const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  Eigen::VectorXd ws(n), half(n);
  for (Eigen::Index i = 0; i < n; ++i) half(i) = std::sqrt(grid_.weights[i]);
  ws = symmetrized() * (half.cwiseProduct(v));
  return ws.cwiseQuotient(half);
}

Eigen::VectorXd DiscreteSection::apply_toeplitz(const Eigen::VectorXd& v) const {
  if (grid_.scheme != QuadratureGrid::Scheme::UniformTrapezoid)
    throw SchemeMismatch("Toeplitz matvec requires the uniform scheme");
  const auto n = static_cast<Eigen::Index>(grid_.size());
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      acc += toeplitz_row_[static_cast<std::size_t>(std::abs(i - j))] *
             grid_.weights[j] * v(j);
    out(i) = v(i) - step_.mu * acc;
  }
  return out;
}

Eigen::VectorXd DiscreteSection::solve(const Eigen::VectorXd& rhs,
                                       SolveMethod method) const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (rhs.size() != n) throw Error("solve: right-hand side size mismatch");

  if (method == SolveMethod::Dense) {
    Eigen::VectorXd half(n);
    for (Eigen::Index i = 0; i < n; ++i) half(i) = std::sqrt(grid_.weights[i]);
    Eigen::VectorXd u = llt().solve(half.cwiseProduct(rhs).eval());
    return u.cwiseQuotient(half);
  }

  if (grid_.scheme != QuadratureGrid::Scheme::UniformTrapezoid)
    throw SchemeMismatch("Levinson solve requires the uniform scheme");

  // A = T + (mu d/2)(K e_f e_f^T + K e_l e_l^T), T = I - mu d K:
  // Woodbury on top of a pure-Toeplitz Levinson solve, using
  // T^{-1} K e_f = (T^{-1} e_f - e_f)/(mu d) and its reversal.
  const double mu = step_.mu;
  const double d = grid_.step;
  std::vector<double> first_col(grid_.size());
  for (std::size_t j = 0; j < grid_.size(); ++j)
    first_col[j] = (j == 0 ? 1.0 : 0.0) - mu * d * toeplitz_row_[j];

  LevinsonEngine eng(first_col[0]);
  const int slot = eng.track(rhs(0));
  for (std::size_t j = 1; j < grid_.size(); ++j) {
    const double b = rhs(static_cast<Eigen::Index>(j));
    eng.grow(first_col[j], std::span<const double>(&b, 1));
  }
  const auto& x = eng.solution(slot);
  const auto& a = eng.filter();
  const double E = eng.prediction_error();
  const std::size_t N = grid_.size();

  std::vector<double> y(N);
  for (std::size_t j = 0; j < N; ++j) y[j] = a[j] / E;

  const double m00 = 1.0 + 0.5 * (y[0] - 1.0);
  const double m01 = 0.5 * y[N - 1];
  const double det = m00 * m00 - m01 * m01;
  const double v0 = x[0], v1 = x[N - 1];
  const double s0 = (m00 * v0 - m01 * v1) / det;
  const double s1 = (-m01 * v0 + m00 * v1) / det;

  Eigen::VectorXd out(n);
  for (std::size_t j = 0; j < N; ++j) {
    const double gf = 0.5 * (y[j] - (j == 0 ? 1.0 : 0.0));
    const double gl = 0.5 * (y[N - 1 - j] - (j == N - 1 ? 1.0 : 0.0));
    out(static_cast<Eigen::Index>(j)) = x[j] - (gf * s0 + gl * s1);
  }
  return out;
}

Eigen::MatrixXd DiscreteSection::inverse_node_matrix() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  Eigen::MatrixXd inv = llt().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::VectorXd half(n);
  for (Eigen::Index i = 0; i < n; ++i) half(i) = std::sqrt(grid_.weights[i]);
  // A^{-1} = W^{-1/2} Shat^{-1} W^{1/2}
  return half.cwiseInverse().asDiagonal() * inv * half.asDiagonal();
}

ResolventSection DiscreteSection::resolvent() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  Eigen::MatrixXd inv = llt().solve(Eigen::MatrixXd::Identity(n, n));
  ResolventSection r;
  r.step = step_;
  r.xi = grid_.xi;
  r.nodes = grid_.nodes;
  r.weights = grid_.weights;
  r.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      r.values(i, j) = (inv(i, j) - (i == j ? 1.0 : 0.0)) /
                       std::sqrt(grid_.weights[i] * grid_.weights[j]);
  r.corner = r.eval(grid_.xi, 0.0);
  r.diag_corner = r.eval(grid_.xi, grid_.xi);
  return r;
}

std::pair<double, double> DiscreteSection::spectrum_bounds() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(),
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

double ResolventSection::eval(double x, double t) const {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  const double mu = step.mu;
  // second-argument extension at each node row, then first-argument pass
  Eigen::VectorXd col(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      acc += weights[j] * step.h(t - nodes[j]) * values(j, k);
    col(k) = mu * step.h(t - nodes[k]) + mu * acc;
  }
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    acc += weights[k] * step.h(x - nodes[k]) * col(k);
  return mu * step.h(x - t) + mu * acc;
}

double ResolventSection::symmetry_defect() const {
  return (values - values.transpose()).cwiseAbs().maxCoeff();
}

double ResolventSection::persymmetry_defect() const {
  const auto n = values.rows();
  double d = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      d = std::max(d, std::abs(values(n - 1 - i, n - 1 - j) - values(i, j)));
  return d;
}

Eigen::VectorXd r_xi_solve(const DiscreteSection& section, SolveMethod method) {
  if (!(section.mu() > 0.0 && section.mu() < 1.0) && section.mu() != 0.0)
    throw InvalidCoupling("r_xi requires 0 <= mu < 1");
  const auto n = static_cast<Eigen::Index>(section.size());
  Eigen::VectorXd qv(n);
  for (Eigen::Index i = 0; i < n; ++i) qv(i) = section.step().q(section.grid().nodes[i]);
  return section.solve(qv, method);
}

std::vector<IdentityReport> section_identities(const DiscreteSection& section) {
  const auto& grid = section.grid();
  const auto& step = section.step();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const bool panels = grid.scheme == QuadratureGrid::Scheme::GaussLegendrePanels;
  const double quad_scale =
      panels ? 1e-8
             : 0.5 * grid.step * grid.step * step.a_max() * step.a_max() + 1e-10;

  std::vector<IdentityReport> out;
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  {  // S 1 = M(x) + M(xi - x)
    Eigen::VectorXd lhs = section.apply(ones);
    double defect = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      defect = std::max(defect, std::abs(lhs(i) - step.M(grid.nodes[i]) -
                                         step.M(grid.xi - grid.nodes[i])));
    out.push_back({"S_xi 1 = M(x) + M(xi-x)", defect, std::max(1e-8, quad_scale), false});
  }

  {  // S^{-1} 1 = [1 - r - U r] / (1 - mu)
    Eigen::VectorXd sinv1 = section.solve(ones);
    Eigen::VectorXd r = r_xi_solve(section);
    double defect = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double rhs = (1.0 - r(i) - r(n - 1 - i)) / (1.0 - step.mu);
      defect = std::max(defect, std::abs(sinv1(i) - rhs));
    }
    out.push_back({"S_xi^{-1} 1 = [1 - r - Ur]/(1-mu)", defect,
                   std::max(1e-7, 10.0 * quad_scale), false});
  }

  {
    ResolventSection r = section.resolvent();
    out.push_back({"resolvent symmetry", r.symmetry_defect(), 1e-8, false});
    out.push_back({"resolvent persymmetry", r.persymmetry_defect(), 1e-8, false});
  }

  {
    const auto [lo, hi] = section.spectrum_bounds();
    const double eps = 1e-3;
    const double viol = std::max(0.0, (1.0 - std::abs(step.mu) - eps) - lo) +
                        std::max(0.0, hi - (1.0 + std::abs(step.mu) + eps));
    out.push_back({"spectrum within [1-mu-eps, 1+mu+eps]", viol, 1e-12, false});
  }

  for (auto& rep : out) rep.pass = rep.defect <= rep.tol;
  return out;
}

Eigen::MatrixXd lower_factor_matrix(const DiscreteSection& section) {
  const auto& grid = section.grid();
  if (grid.scheme != QuadratureGrid::Scheme::UniformTrapezoid)
    throw SchemeMismatch("triangular factor rows require the uniform scheme");
  const auto n = static_cast<Eigen::Index>(grid.size());
  SectionSweep sweep(section.step(), grid.step, grid.xi, /*keep_rows=*/true);

  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    const auto& row = sweep.rows()[static_cast<std::size_t>(i - 1)];
    for (Eigen::Index j = 0; j <= i; ++j) V(i, j) = row[static_cast<std::size_t>(j)];
    V(i, i) -= 1.0;
  }
  // boundary diagonal entries carry half quadrature weight so the composed
  // trapezoid rule stays second order at both ends
  V(0, 0) = (grid.step / 4.0) * section.mu() * section.step().h(0.0);
  V(n - 1, n - 1) *= 0.5;
  return V;
}

double krein_factorization_check(const DiscreteSection& section) {
  const auto& grid = section.grid();
  if (grid.scheme != QuadratureGrid::Scheme::UniformTrapezoid)
    throw SchemeMismatch("factorization check requires the uniform scheme");
  const auto n = static_cast<Eigen::Index>(grid.size());

  Eigen::MatrixXd Vm = lower_factor_matrix(section);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = grid.weights[i];
  Eigen::MatrixXd Vp =
      w.cwiseInverse().asDiagonal() * Vm.transpose() * w.asDiagonal();

  Eigen::MatrixXd lhs = (Eigen::MatrixXd::Identity(n, n) + Vp) *
                        (Eigen::MatrixXd::Identity(n, n) + Vm);
  Eigen::MatrixXd rhs = section.inverse_node_matrix();
  return (lhs - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff();
}

}  // namespace kreinlab

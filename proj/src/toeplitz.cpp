#include "kreinlab/toeplitz.hpp"

#include <cmath>

#include "kreinlab/errors.hpp"

namespace kreinlab {

LevinsonEngine::LevinsonEngine(double t0) : energy_(t0) {
  if (!(t0 > 0.0)) throw NotPositiveDefinite("leading Toeplitz entry not positive");
  t_.push_back(t0);
  a_.push_back(1.0);
}

int LevinsonEngine::track(double b0) {
  sols_.push_back({b0 / t_[0]});
  return static_cast<int>(sols_.size()) - 1;
}

void LevinsonEngine::grow(double t_new, std::span<const double> b_new) {
  const std::size_t n = a_.size();
  t_.push_back(t_new);

  // reflection coefficient from the filter against the reversed new row
  double beta = 0.0;
  for (std::size_t j = 0; j < n; ++j) beta += t_[n - j] * a_[j];
  const double k = beta / energy_;

  scratch_.resize(n + 1);
  scratch_[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) scratch_[j] = a_[j] - k * a_[n - j];
  scratch_[n] = -k * a_[0];
  a_.swap(scratch_);

  energy_ *= (1.0 - k * k);
  if (!(energy_ > 0.0) || !std::isfinite(energy_))
    throw NotPositiveDefinite("Levinson prediction error collapsed");

  for (std::size_t r = 0; r < sols_.size(); ++r) {
    auto& x = sols_[r];
    double theta = b_new[r];
    for (std::size_t j = 0; j < n; ++j) theta -= t_[n - j] * x[j];
    const double scale = theta / energy_;
    x.push_back(0.0);
    for (std::size_t j = 0; j <= n; ++j) x[j] += scale * a_[n - j];
  }
}

std::vector<double> toeplitz_solve(std::span<const double> first_col,
                                   std::span<const double> rhs) {
  const std::size_t n = first_col.size();
  if (rhs.size() != n) throw Error("toeplitz_solve: size mismatch");
  LevinsonEngine eng(first_col[0]);
  const int slot = eng.track(rhs[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double b = rhs[i];
    eng.grow(first_col[i], std::span<const double>(&b, 1));
  }
  return eng.solution(slot);
}

namespace {

struct Woodbury2 {
  // M2 = I + (1/2) [[y0-1, yl], [yl, y0-1]] and its inverse, for the
  // trapezoid rank-2 endpoint correction A = T + (mu d/2)(c e_f^T + d e_l^T).
  double inv[2][2];
  Woodbury2(double y0, double yl) {
    const double m00 = 1.0 + 0.5 * (y0 - 1.0);
    const double m01 = 0.5 * yl;
    const double det = m00 * m00 - m01 * m01;
    inv[0][0] = m00 / det;
    inv[1][1] = m00 / det;
    inv[0][1] = -m01 / det;
    inv[1][0] = -m01 / det;
  }
  void apply(double v0, double v1, double& o0, double& o1) const {
    o0 = inv[0][0] * v0 + inv[0][1] * v1;
    o1 = inv[1][0] * v0 + inv[1][1] * v1;
  }
};

}  // namespace

SectionSweep::SectionSweep(const SpectralStep& step, double delta, double xi_max,
                           bool keep_rows)
    : delta_(delta) {
  if (!(delta > 0.0) || !(xi_max > 0.0))
    throw Error("SectionSweep: delta and xi_max must be positive");
  step.validate();
  const double mu = step.mu;
  const std::size_t N = static_cast<std::size_t>(std::llround(xi_max / delta)) + 1;

  x_.resize(N);
  B_.resize(N);
  q1_.resize(N);
  q2_.resize(N);
  Q_.resize(N);

  std::vector<double> hs(N), Ms(N);
  for (std::size_t j = 0; j < N; ++j) {
    x_[j] = static_cast<double>(j) * delta;
    hs[j] = step.h(x_[j]);
    Ms[j] = step.M(x_[j]);
  }

  // zero-length section limits
  B_[0] = mu * hs[0];
  q1_[0] = 1.0;
  q2_[0] = Ms[0];
  Q_[0] = Ms[0] - (1.0 - mu) / 2.0;

  LevinsonEngine eng(1.0 - mu * delta * hs[0]);
  const int s_one = eng.track(1.0);
  const int s_M = eng.track(Ms[0]);

  if (keep_rows) rows_.reserve(N - 1);

  std::vector<double> y;
  for (std::size_t n = 2; n <= N; ++n) {
    const double b_new[2] = {1.0, Ms[n - 1]};
    eng.grow(-mu * delta * hs[n - 1], b_new);

    const auto& a = eng.filter();
    const double E = eng.prediction_error();
    y.resize(n);
    for (std::size_t j = 0; j < n; ++j) y[j] = a[j] / E;

    const Woodbury2 wb(y[0], y[n - 1]);
    // last-entry corrections: g = (1/2)[(y - e_f)_last, (rev y - e_l)_last]
    const double g0 = 0.5 * y[n - 1];
    const double g1 = 0.5 * (y[0] - 1.0);
    auto last_entry = [&](double x_first, double x_last) {
      double s0, s1;
      wb.apply(x_first, x_last, s0, s1);
      return x_last - (g0 * s0 + g1 * s1);
    };

    const auto& x1 = eng.solution(s_one);
    const auto& xM = eng.solution(s_M);
    q1_[n - 1] = last_entry(x1[0], x1[n - 1]);
    q2_[n - 1] = last_entry(xM[0], xM[n - 1]);
    Q_[n - 1] = q2_[n - 1] - (1.0 - mu) / 2.0 * q1_[n - 1];
    B_[n - 1] = last_entry(y[0], y[n - 1]) / (delta / 2.0);

    if (keep_rows) {
      // last row of A^{-1}: A^{-T} e_l = rev y - (1/2)[y, rev y] M2^{-1} [y_l, y_0 - 1]^T
      double s0, s1;
      wb.apply(y[n - 1], y[0] - 1.0, s0, s1);
      std::vector<double> row(n);
      for (std::size_t j = 0; j < n; ++j)
        row[j] = y[n - 1 - j] - 0.5 * (s0 * y[j] + s1 * y[n - 1 - j]);
      rows_.push_back(std::move(row));
    }
  }
}

}  // namespace kreinlab

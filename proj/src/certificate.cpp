#include "kreinlab/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "kreinlab/errors.hpp"
#include "kreinlab/numerics.hpp"

namespace kreinlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI(0.0, 1.0);
constexpr double kPoleGuard = 1e-6;

void require_upper_half(Complex z) {
  if (!(z.imag() > 0.0)) throw Error("Pi(z) is defined on the open upper half-plane");
}

void pole_guard(const SpectralStep& step, Complex z) {
  for (double a : step.partition) {
    if (std::abs(z - a) < kPoleGuard || std::abs(z + a) < kPoleGuard)
      throw PoleProximity("z too close to a real partition point");
  }
}

// Per-interval contribution of int_{[a_{k-1},a_k]} + int_{[-a_k,-a_{k-1}]} of
// (1+tz)/((t-z)(1+t^2)) dt; the odd t/(1+t^2) part cancels over the pair and
// the rest telescopes to principal logarithms, all of whose arguments stay
// in the lower half-plane for Im z > 0.
Complex piece_log(double lo, double hi, Complex z) {
  return std::log(hi - z) - std::log(lo - z) + std::log(-lo - z) - std::log(-hi - z);
}

std::vector<double> default_y_grid() {
  std::vector<double> y;
  double v = 1.0;
  for (int k = 0; k < 11; ++k) {
    y.push_back(v);
    v *= 0.5;
  }
  return y;
}

double extrapolate_tail(const std::vector<double>& ys, const std::vector<double>& vals,
                        std::size_t points) {
  const std::size_t n = std::min(points, ys.size());
  std::vector<double> xs(ys.end() - static_cast<long>(n), ys.end());
  std::vector<double> fs(vals.end() - static_cast<long>(n), vals.end());
  return neville_to_zero(xs, fs);
}

}  // namespace

Complex pi_integral(const SpectralStep& step, Complex z) {
  require_upper_half(z);
  Complex expo(0.0);
  for (std::size_t k = 0; k < step.coeffs.size(); ++k)
    expo += std::log(1.0 - step.mu * step.coeffs[k]) *
            piece_log(step.partition[k], step.partition[k + 1], z);
  return std::exp(expo / (2.0 * kPi * kI));
}

Complex pi_integral_sigma_form(const SpectralStep& step, Complex z) {
  require_upper_half(z);
  Complex expo(0.0);
  for (std::size_t k = 0; k < step.coeffs.size(); ++k)
    expo += std::log((1.0 - step.mu * step.coeffs[k]) / (2.0 * kPi)) *
            piece_log(step.partition[k], step.partition[k + 1], z);
  const double an = step.partition.back();
  const Complex tail = kI * kPi - std::log(an - z) + std::log(-an - z);
  expo += std::log(1.0 / (2.0 * kPi)) * tail;
  return std::sqrt(2.0 * kPi) * std::exp(expo / (2.0 * kPi * kI));
}

Complex pi_integral_quadrature(const SpectralStep& step, Complex z, int order) {
  require_upper_half(z);
  const auto [xg, wg] = gauss_legendre(order);
  Complex expo(0.0);
  for (std::size_t k = 0; k < step.coeffs.size(); ++k) {
    const double v = std::log(1.0 - step.mu * step.coeffs[k]);
    for (int side = 0; side < 2; ++side) {
      const double lo = side == 0 ? step.partition[k] : -step.partition[k + 1];
      const double hi = side == 0 ? step.partition[k + 1] : -step.partition[k];
      // theta = atan(t): the 1/(1+t^2) weight becomes flat
      const double tlo = std::atan(lo), thi = std::atan(hi);
      for (int i = 0; i < order; ++i) {
        const double th = 0.5 * (tlo + thi) + 0.5 * (thi - tlo) * xg[i];
        const double t = std::tan(th);
        expo += 0.5 * (thi - tlo) * wg[i] * v * (1.0 + t * z) / (t - z);
      }
    }
  }
  return std::exp(expo / (2.0 * kPi * kI));
}

Complex pi_product(const SpectralStep& step, Complex z) {
  require_upper_half(z);
  pole_guard(step, z);
  const Complex anchor = kI;

  Complex log_sum(0.0);
  for (std::size_t k = 0; k < step.coeffs.size(); ++k) {
    const double lo = step.partition[k], hi = step.partition[k + 1];
    auto base = [&](Complex w) {
      return ((hi - w) * (lo + w)) / ((lo - w) * (hi + w));
    };
    // branch anchor: the factor's log at z = i, in the decomposition the
    // integral route uses, so the two routes agree there by construction
    Complex L = piece_log(lo, hi, anchor);
    // continue the logarithm along the segment anchor -> z
    bool ok = false;
    for (int steps = 16; steps <= (1 << 20); steps *= 2) {
      Complex Lpath = L;
      Complex prev = base(anchor);
      bool fine = true;
      for (int s = 1; s <= steps; ++s) {
        const Complex w = anchor + (z - anchor) * (static_cast<double>(s) / steps);
        const Complex cur = base(w);
        const Complex inc = std::log(cur / prev);
        if (std::abs(inc.imag()) > kPi / 2.0) {
          fine = false;
          break;
        }
        Lpath += inc;
        prev = cur;
      }
      if (fine) {
        L = Lpath;
        ok = true;
        break;
      }
    }
    if (!ok) throw BranchAnchorFailure("log continuation failed along the anchor path");
    log_sum += std::log(1.0 - step.mu * step.coeffs[k]) * L;
  }
  return std::exp(log_sum / (2.0 * kPi * kI));
}

PiLimit pi_limit(const KreinTrajectory& traj, const KreinSolution& sol,
                 const SubsequencePick& pick) {
  if (pick.indices.empty()) throw NoQualifyingPoints("empty subsequence pick");
  (void)traj;
  PiLimit out;
  const std::size_t m = pick.indices.size();
  const std::size_t first = m >= 3 ? m - 3 : 0;
  for (std::size_t i = first; i < m; ++i)
    out.tail.push_back(1.0 / sol.Pstar[pick.indices[i]]);
  out.value = out.tail.back();
  double spread = 0.0;
  for (std::size_t i = 0; i < out.tail.size(); ++i)
    for (std::size_t j = i + 1; j < out.tail.size(); ++j)
      spread = std::max(spread, std::abs(out.tail[i] - out.tail[j]));
  out.spread = spread;
  return out;
}

Complex g_of_xi(const DiscreteSection& section, Complex z) {
  const Eigen::VectorXd r = r_xi_solve(section);
  const auto& grid = section.grid();
  Complex acc(0.0);
  for (std::size_t k = 0; k < grid.size(); ++k)
    acc += grid.weights[k] * std::exp(-kI * z * grid.nodes[k]) *
           r(static_cast<Eigen::Index>(k));
  return (1.0 - kI * z * acc) / (1.0 - section.mu());
}

BoundaryReport boundary_limits(const SpectralStep& step, const KreinTrajectory& traj,
                               const SubsequencePick& pick,
                               const std::vector<double>& y_grid_in) {
  BoundaryReport rep;
  rep.y_grid = y_grid_in.empty() ? default_y_grid() : y_grid_in;
  for (std::size_t i = 1; i < rep.y_grid.size(); ++i)
    if (!(rep.y_grid[i] < rep.y_grid[i - 1]) || !(rep.y_grid[i] > 0.0))
      throw Error("y grid must be positive and decreasing");

  const double ymin = 1e-6;
  for (std::size_t k = 0; k < step.coeffs.size(); ++k) {
    const Complex up(step.partition[k + 1], 0.0), lo(step.partition[k], 0.0);
    rep.mobius_at_min_y.push_back(((up - kI * ymin) / (up + kI * ymin)) *
                                  ((lo + kI * ymin) / (lo - kI * ymin)));
  }

  std::vector<double> vals;
  for (double y : rep.y_grid) {
    const Complex p = pi_product(step, kI * y);
    rep.pi_on_y_grid.push_back(p);
    vals.push_back(p.real());
  }
  rep.pi_extrapolated = extrapolate_tail(rep.y_grid, vals, 4);
  rep.pi_target = std::sqrt(1.0 - step.mu);

  for (std::size_t idx : pick.indices) rep.q1_at_picks.push_back(traj.q1_direct[idx]);
  rep.q1_target = 1.0 / std::sqrt(1.0 - step.mu);
  return rep;
}

NonFactorabilityCertificate certificate(const SpectralStep& step,
                                        const CertificateOptions& opt) {
  step.validate(step.mu != 0.0);

  NonFactorabilityCertificate cert;
  cert.mu = step.mu;
  cert.C = 1.0 / std::sqrt(1.0 - step.mu);
  cert.probes = opt.probes;
  cert.y_grid = opt.y_grid.empty() ? default_y_grid() : opt.y_grid;
  cert.gap_target = step.mu / (1.0 - step.mu);

  KreinTrajectory traj = sweep_B(step, opt.xi_max, opt.delta);
  q_trajectories(traj);

  // probe integrations (independent; fan out over the configured threads)
  std::vector<KreinSolution> sols(opt.probes.size());
  {
    const char* env = std::getenv("KREINLAB_THREADS");
    std::size_t n_threads = 1;
    if (env) n_threads = std::max(1L, std::atol(env));
    n_threads = std::min(n_threads, opt.probes.size());
    if (n_threads <= 1) {
      for (std::size_t i = 0; i < opt.probes.size(); ++i)
        sols[i] = integrate_krein_system(traj, opt.probes[i], opt.substeps);
    } else {
      std::vector<std::thread> pool;
      std::atomic<std::size_t> next{0};
      for (std::size_t t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
          for (std::size_t i = next.fetch_add(1); i < opt.probes.size();
               i = next.fetch_add(1))
            sols[i] = integrate_krein_system(traj, opt.probes[i], opt.substeps);
        });
      for (auto& th : pool) th.join();
    }
  }

  // subsequence from the first strictly-upper probe (default z0 = i)
  std::size_t z0_idx = 0;
  for (std::size_t i = 0; i < opt.probes.size(); ++i)
    if (opt.probes[i].imag() > 0.0) {
      z0_idx = i;
      break;
    }
  SubsequencePick pick = select_subsequence(traj, sols[z0_idx], opt.percentile);

  const int n_panels =
      std::max(1, static_cast<int>(std::ceil(opt.xi_max / opt.panel_length)));
  DiscreteSection panel_section(
      step, QuadratureGrid::panels(opt.xi_max, n_panels, opt.panel_order));

  for (std::size_t i = 0; i < opt.probes.size(); ++i) {
    const Complex z = opt.probes[i];
    if (!(z.imag() > 0.0)) continue;  // real probes serve the conservation tests
    cert.pi_prod.push_back(pi_product(step, z));
    cert.pi_int.push_back(pi_integral(step, z));
    const PiLimit lim = pi_limit(traj, sols[i], pick);
    cert.pi_lim.push_back(lim.value);
    cert.pi_lim_spread.push_back(lim.spread);
    cert.G_at_xi_max.push_back(g_of_xi(panel_section, z));
  }

  std::vector<double> cpi_vals, gbar_vals;
  for (double y : cert.y_grid) {
    const Complex cpi = cert.C * pi_product(step, kI * y);
    const Complex gb = std::conj(g_of_xi(panel_section, -kI * y));
    cert.c_pi.push_back(cpi);
    cert.g_bar.push_back(gb);
    cpi_vals.push_back(cpi.real());
    gbar_vals.push_back(gb.real());
  }
  cert.L_true = -extrapolate_tail(cert.y_grid, cpi_vals, 4);
  cert.L_fact = -extrapolate_tail(cert.y_grid, gbar_vals, 4);
  cert.gap = std::abs(cert.L_fact - cert.L_true);

  const double res_true = std::abs(extrapolate_tail(cert.y_grid, cpi_vals, 4) -
                                   extrapolate_tail(cert.y_grid, cpi_vals, 3));
  const double res_fact = std::abs(extrapolate_tail(cert.y_grid, gbar_vals, 4) -
                                   extrapolate_tail(cert.y_grid, gbar_vals, 3));
  double res_lim = 0.0;
  for (double s : cert.pi_lim_spread) res_lim = std::max(res_lim, s);
  cert.resolution = std::max({res_true, res_fact, res_lim, 1e-9});

  // Finite-pick witness of the asymptotics: w12(x_n, i y0) pairs with
  // -C lim P* = -C / Pi(i y0).
  {
    const double y0 = 0.5;
    const KreinSolution sol_y0 = integrate_krein_system(traj, kI * y0, opt.substeps);
    const double x_best = traj.x[pick.indices.back()];
    const Complex w12 = w12_from_solution(traj, sol_y0, x_best);
    cert.w12_pick_defect = std::abs(w12 + cert.C / pi_product(step, kI * y0));
  }

  const double floor = std::max(cert.resolution, 1e-6);
  if (cert.gap > 3.0 * floor) {
    cert.verdict = "non-factorable";
  } else if (cert.gap <= floor) {
    cert.verdict = step.mu == 0.0 ? "factorable (identity)" : "factorable (no obstruction)";
  } else {
    throw ResolutionInsufficient(
        "gap not separated from numerical noise; enlarge xi_max or refine the grid");
  }
  return cert;
}

}  // namespace kreinlab

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "kreinlab/errors.hpp"
#include "kreinlab/runner.hpp"
#include "kreinlab/sine_integral.hpp"
#include "kreinlab/toeplitz.hpp"

namespace kreinlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI(0.0, 1.0);

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void push(std::vector<IdentityReport>& checks, std::string name, double defect,
          double tol) {
  checks.push_back({std::move(name), defect, tol, defect <= tol});
}

// shared lazily-computed state across suites
struct Context {
  const ExperimentConfig& cfg;
  std::optional<KreinTrajectory> traj;
  std::map<std::pair<double, double>, KreinSolution> sols;
  std::optional<SubsequencePick> pick;

  explicit Context(const ExperimentConfig& c) : cfg(c) {}

  const KreinTrajectory& trajectory() {
    if (!traj) {
      traj = sweep_B(cfg.step, cfg.xi_max, cfg.effective_delta());
      q_trajectories(*traj);
    }
    return *traj;
  }

  const KreinSolution& solution(Complex z) {
    const auto key = std::make_pair(z.real(), z.imag());
    auto it = sols.find(key);
    if (it == sols.end())
      it = sols.emplace(key, integrate_krein_system(trajectory(), z, cfg.substeps))
               .first;
    return it->second;
  }

  Complex first_upper_probe() const {
    for (Complex z : cfg.probes)
      if (z.imag() > 0.0) return z;
    return kI;
  }

  const SubsequencePick& subsequence() {
    if (!pick) pick = select_subsequence(trajectory(), solution(first_upper_probe()),
                                         cfg.percentile);
    return *pick;
  }

  DiscreteSection panel_section(double xi) const {
    const int n_panels = std::max(1, static_cast<int>(std::ceil(xi)));
    return DiscreteSection(cfg.step, QuadratureGrid::panels(
                                         xi, cfg.panel_count > 0 ? cfg.panel_count
                                                                 : n_panels,
                                         cfg.panel_order));
  }
};

// ---------------------------------------------------------------- kernel --

SuiteResult run_kernel_suite(Context& ctx) {
  const auto t0 = Clock::now();
  const SpectralStep& step = ctx.cfg.step;
  SuiteResult res;
  res.name = "kernel";

  // sine integral spot values against its defining properties
  push(res.checks, "Si(0) = 0", std::abs(sine_integral(0.0)), 0.0);
  push(res.checks, "Si(pi) value", std::abs(sine_integral(kPi) - 1.8519370519824661),
       1e-12);
  push(res.checks, "Si(1e6) -> pi/2", std::abs(sine_integral(1e6) - kPi / 2.0), 2e-6);
  {
    double mono = 0.0;  // Si(10^k) approaches pi/2 monotonically from the series side
    double prev = std::abs(sine_integral(1e2) - kPi / 2.0);
    for (double x : {1e3, 1e4, 1e5}) {
      const double cur = std::abs(sine_integral(x) - kPi / 2.0);
      mono = std::max(mono, cur - prev);
      prev = cur;
    }
    push(res.checks, "Si tail envelope shrinks", mono, 0.0);
  }

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> uni(-2.0 * step.a_max(), 2.0 * step.a_max());

  {  // evenness of rho, sigma', h at sampled points
    double d = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double lam = uni(rng);
      d = std::max(d, std::abs(step.rho(lam) - step.rho(-lam)));
      d = std::max(d, std::abs(step.sigma_prime(lam) - step.sigma_prime(-lam)));
      d = std::max(d, std::abs(step.h(lam) - step.h(-lam)));
    }
    push(res.checks, "evenness of rho, sigma', h", d, 0.0);
  }

  {  // h(0) equals the interval-length sum
    double expect = 0.0;
    for (std::size_t k = 0; k < step.coeffs.size(); ++k)
      expect += step.coeffs[k] * (step.partition[k + 1] - step.partition[k]);
    expect /= kPi;
    push(res.checks, "h(0) limit", std::abs(step.h(0.0) - expect), 1e-14);
  }

  {  // sigma' stays within [(1-mu)/2pi, (1+mu)/2pi]
    double viol = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double lam = -2.0 * step.a_max() + i * step.a_max() / 50.0;
      const double v = step.sigma_prime(lam);
      viol = std::max(viol, std::max((1.0 - std::abs(step.mu)) / (2.0 * kPi) - v,
                                     v - (1.0 + std::abs(step.mu)) / (2.0 * kPi)));
    }
    push(res.checks, "sigma' within bounds", std::max(viol, 0.0), 1e-15);
  }

  {  // h against direct Fourier inversion of rho at sampled points
    const auto [xg, wg] = gauss_legendre(200);
    double d = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double x = uni(rng);
      double inv = 0.0;  // (1/pi) int_0^a rho cos(x lam) dlam
      for (std::size_t k = 0; k < step.coeffs.size(); ++k) {
        const double a = step.partition[k], b = step.partition[k + 1];
        for (std::size_t g = 0; g < xg.size(); ++g) {
          const double lam = 0.5 * (a + b) + 0.5 * (b - a) * xg[g];
          inv += 0.5 * (b - a) * wg[g] * step.coeffs[k] * std::cos(x * lam) / kPi;
        }
      }
      d = std::max(d, std::abs(step.h(x) - inv));
    }
    push(res.checks, "h equals Fourier inversion of rho", d, 1e-8);
  }

  {  // M(0), q(0) and the exact M - q offset
    const auto [M0, q0] = step.M_and_q(0.0);
    push(res.checks, "M(0) = 1/2", std::abs(M0 - 0.5), 0.0);
    push(res.checks, "q(0) = mu/2", std::abs(q0 - step.mu / 2.0), 1e-16);
    double off = 0.0;
    for (double x : {0.3, 1.7, 9.2, 44.0}) {
      const auto [Mv, qv] = step.M_and_q(x);
      off = std::max(off, std::abs(Mv - qv - (1.0 - step.mu) / 2.0));
    }
    push(res.checks, "M - q = (1-mu)/2", off, 1e-15);
  }

  {  // primitive of h reaches 1/2: |q| <= K/x tail envelope on [1, 1e3]
    double K = 0.0;
    for (double x = 1.0; x <= 1000.0; x *= 1.35)
      K = std::max(K, std::abs(x * step.q(x) / (step.mu == 0.0 ? 1.0 : step.mu)));
    push(res.checks, "tail envelope |int_x^inf h| <= K/x", K, 2.0);
    push(res.checks, "int_0^inf h = 1/2 (far field)",
         std::abs(step.M(1e4) - (1.0 - step.mu) / 2.0), 1e-3);
  }

  {  // finite-difference dM/dx against -mu h
    double d = 0.0;
    const double fd = 1e-4;
    for (double x : {0.4, 1.3, 2.9, 6.1}) {
      const double der = (step.M(x + fd) - step.M(x - fd)) / (2.0 * fd);
      d = std::max(d, std::abs(der + step.mu * step.h(x)));
    }
    push(res.checks, "dM/dx = -mu h (finite difference)", d, 1e-5);
  }

  if (step.mu > 0.0 && step.mu < 1.0) {
    push(res.checks, "Szego integral closed form vs quadrature",
         std::abs(szego_integral(step) - szego_integral_quadrature(step)), 1e-10);
  }

  res.ms = ms_since(t0);
  return res;
}

// --------------------------------------------------------------- section --

SuiteResult run_section_suite(Context& ctx) {
  const auto t0 = Clock::now();
  const SpectralStep& step = ctx.cfg.step;
  SuiteResult res;
  res.name = "section";

  {  // fixed-xi identity suite on the high-order panel grid
    DiscreteSection sec = ctx.panel_section(ctx.cfg.panel_xi);
    for (auto& rep : section_identities(sec)) res.checks.push_back(rep);
  }

  {  // uniform-grid paths: Toeplitz matvec, Levinson vs dense, factorization
    const int N = 512;
    DiscreteSection sec(step, QuadratureGrid::uniform(4.0, N));

    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd rhs(N);
    for (int i = 0; i < N; ++i) rhs(i) = gauss(rng);

    Eigen::VectorXd v(N);
    for (int i = 0; i < N; ++i) v(i) = gauss(rng);
    push(res.checks, "Toeplitz matvec equals dense matvec",
         (sec.apply_toeplitz(v) - sec.apply(v)).cwiseAbs().maxCoeff(), 1e-12);

    const Eigen::VectorXd xd = sec.solve(rhs, SolveMethod::Dense);
    const Eigen::VectorXd xl = sec.solve(rhs, SolveMethod::Levinson);
    push(res.checks, "Levinson agrees with dense solve",
         (xd - xl).cwiseAbs().maxCoeff(), 1e-10);
    push(res.checks, "solve residual",
         (sec.apply(xl) - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff(),
         1e-10);

    // the composed trapezoid error grows with the resolvent size mu/(1-mu)
    const double r = std::abs(step.mu) / (1.0 - std::abs(step.mu));
    push(res.checks, "factorization defect (I+V+)(I+V-) vs S^{-1}",
         krein_factorization_check(sec), 1e-5 * std::max(1.0, r * r));
  }

  {  // positive definiteness margin at the documented example size
    DiscreteSection sec(step, QuadratureGrid::uniform(4.0, 256));
    const auto [lo, hi] = sec.spectrum_bounds();
    push(res.checks, "smallest eigenvalue >= 1 - mu - 1e-3",
         std::max(0.0, (1.0 - std::abs(step.mu) - 1e-3) - lo), 0.0);
    push(res.checks, "largest eigenvalue <= 1 + mu + 1e-3",
         std::max(0.0, hi - (1.0 + std::abs(step.mu) + 1e-3)), 0.0);
  }

  if (step.mu != 0.0) {  // corner refinement: trapezoid error shrinks at second order
    auto corner = [&](int N) {
      DiscreteSection sec(step, QuadratureGrid::uniform(2.0, N));
      return sec.resolvent().values(0, 0);
    };
    const double r1 = corner(41), r2 = corner(81), r4 = corner(161);
    const double ratio = (r1 - r2) / (r2 - r4);
    push(res.checks, "corner refinement ratio near 4", std::abs(ratio - 4.0), 1.5);
  }

  {  // Neumann series: ||R - mu h|| = O(mu^2), slope fit on mu = .02/.04/.08
    std::vector<double> mus = {0.02, 0.04, 0.08}, errs;
    for (double m : mus) {
      SpectralStep s2 = step;
      s2.mu = m;
      DiscreteSection sec(s2, QuadratureGrid::uniform(2.0, 81));
      ResolventSection r = sec.resolvent();
      double e = 0.0;
      for (Eigen::Index i = 0; i < r.values.rows(); ++i)
        for (Eigen::Index j = 0; j < r.values.cols(); ++j)
          e = std::max(e, std::abs(r.values(i, j) -
                                   m * s2.h(r.nodes[i] - r.nodes[j])));
      errs.push_back(e);
    }
    const double slope =
        std::log(errs[2] / errs[0]) / std::log(mus[2] / mus[0]);
    push(res.checks, "Neumann first-order slope = 2", std::abs(slope - 2.0), 0.2);
  }

  res.ms = ms_since(t0);
  return res;
}

// ----------------------------------------------------------------- sweep --

SuiteResult run_sweep_suite(Context& ctx, ReportSummary& summary) {
  const auto t0 = Clock::now();
  SuiteResult res;
  res.name = "sweep";
  const KreinTrajectory& traj = ctx.trajectory();

  if (traj.coarse_warning)
    push(res.checks, "delta resolves the top frequency", 1.0, 0.0);

  const TrajectoryDefects d = trajectory_defects(traj);
  push(res.checks, "max |q1 q2 - 1/2|", d.q1q2, ctx.cfg.tol_traj);
  push(res.checks, "max |1/2 - q1^2 (1-mu)/2 - q1 Q|", d.balance, ctx.cfg.tol_traj);
  push(res.checks, "q1 routes agree", d.q1_cross, ctx.cfg.tol_traj);
  push(res.checks, "q1(0) = 1", d.q1_at_zero, 0.0);
  push(res.checks, "q1 positive", std::max(0.0, -d.q1_min), 0.0);

  if (ctx.cfg.step.mu != 0.0) {  // raw sweep against the dense corner oracle
    const double delta = ctx.cfg.effective_delta();
    SectionSweep raw(ctx.cfg.step, delta, 4.0);
    double defect = 0.0;
    for (double xs : {1.0, 2.0, 3.0, 4.0}) {
      const auto n = static_cast<std::size_t>(std::llround(xs / delta));
      DiscreteSection sec(ctx.cfg.step,
                          QuadratureGrid::uniform(xs, static_cast<int>(n) + 1));
      const Eigen::MatrixXd inv = sec.inverse_node_matrix();
      const double dense_B = inv(static_cast<Eigen::Index>(n), 0) / (delta / 2.0);
      defect = std::max(defect, std::abs(raw.B()[n] - dense_B));
    }
    push(res.checks, "sweep corner matches dense resolvent", defect, 1e-6);
  }

  // score column for the sweep table
  const KreinSolution& sol = ctx.solution(ctx.first_upper_probe());
  summary.score.resize(traj.x.size());
  for (std::size_t j = 0; j < traj.x.size(); ++j)
    summary.score[j] = traj.Q[j] * traj.Q[j] + std::norm(sol.P[j]);
  summary.trajectory = traj;

  {  // running P-energy saturates
    const auto& e = sol.energy;
    const double tail = e.back() - e[3 * e.size() / 4];
    push(res.checks, "P-energy saturates", tail / std::max(e.back(), 1e-30), 0.05);
  }

  res.ms = ms_since(t0);
  return res;
}

// -------------------------------------------------------------------- pi --

SuiteResult run_pi_suite(Context& ctx, ReportSummary& summary) {
  const auto t0 = Clock::now();
  SuiteResult res;
  res.name = "pi";
  const SpectralStep& step = ctx.cfg.step;

  int tag = 0;
  double prod_vs_int = 0.0;
  for (Complex z : ctx.cfg.probes) {
    const std::string name = "p" + std::to_string(tag++);
    if (!(z.imag() > 0.0)) continue;
    const Complex prod = pi_product(step, z);
    const Complex integ = pi_integral(step, z);
    prod_vs_int = std::max(prod_vs_int, std::abs(prod - integ));
    summary.pi_rows.push_back({name, z, "product", prod});
    summary.pi_rows.push_back({name, z, "integral", integ});
    const PiLimit lim = pi_limit(ctx.trajectory(), ctx.solution(z), ctx.subsequence());
    summary.pi_rows.push_back({name, z, "limit", lim.value});
  }
  push(res.checks, "product vs integral on the probe set", prod_vs_int, ctx.cfg.tol_pi);

  {  // limit route at the subsequence probe
    const Complex z0 = ctx.first_upper_probe();
    const PiLimit lim = pi_limit(ctx.trajectory(), ctx.solution(z0), ctx.subsequence());
    push(res.checks, "limit vs product at z0",
         std::abs(lim.value - pi_product(step, z0)), ctx.cfg.tol_pi_limit);

    // spread of the limit estimates over sliding 3-pick windows shrinks
    const auto& pick = ctx.subsequence();
    const auto& sol = ctx.solution(z0);
    std::vector<double> spreads;
    if (pick.indices.size() >= 3) {
      for (std::size_t w = 0; w + 3 <= pick.indices.size(); ++w) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = w; i < w + 3; ++i) {
          const double v = std::abs(1.0 / sol.Pstar[pick.indices[i]]);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        spreads.push_back(hi - lo);
      }
    }
    const double grow =
        spreads.empty() ? 0.0 : std::max(0.0, spreads.back() - spreads.front());
    push(res.checks, "limit-window spread shrinks", grow, 1e-9);
  }

  {  // boundary behaviour
    const std::vector<double> yg =
        ctx.cfg.y_grid.empty() ? std::vector<double>{} : ctx.cfg.y_grid;
    const BoundaryReport rep =
        boundary_limits(step, ctx.trajectory(), ctx.subsequence(), yg);
    push(res.checks, "extrapolated Pi(iy) vs sqrt(1-mu)",
         std::abs(rep.pi_extrapolated - rep.pi_target), ctx.cfg.tol_boundary);
    double mob = 0.0;
    for (std::size_t k = 0; k < rep.mobius_at_min_y.size(); ++k)
      mob = std::max(mob, std::abs(rep.mobius_at_min_y[k] -
                                   Complex(k == 0 ? -1.0 : 1.0, 0.0)));
    push(res.checks, "Moebius ratios at y = 1e-6", mob, 1e-5);
    double q1d = 0.0;
    for (std::size_t i = rep.q1_at_picks.size() >= 3 ? rep.q1_at_picks.size() - 3 : 0;
         i < rep.q1_at_picks.size(); ++i)
      q1d = std::max(q1d, std::abs(rep.q1_at_picks[i] - rep.q1_target));
    push(res.checks, "q1 at final picks vs 1/sqrt(1-mu)", q1d, ctx.cfg.tol_limits);

    for (std::size_t i = 0; i < rep.y_grid.size(); ++i)
      summary.pi_rows.push_back(
          {"boundary", kI * rep.y_grid[i], "product", rep.pi_on_y_grid[i]});
  }

  {  // cross-route monodromy entries on a (xi, z) lattice
    double worst = 0.0;
    for (double xi : {2.0, 4.0, 8.0}) {
      DiscreteSection sec = ctx.panel_section(xi);
      for (Complex z : {kI, 2.0 * kI, Complex(1.0, 1.0)}) {
        const Complex quad = w12_inner_product(sec, z);
        const Complex ode = w12_from_solution(ctx.trajectory(), ctx.solution(z), xi);
        const Complex g1 = g_of_xi(sec, z);
        const Complex g2 = g_of_xi(sec, std::conj(z));
        const Complex rec = std::exp(kI * z * xi) * g1 - std::conj(g2);
        worst = std::max({worst, std::abs(quad - ode), std::abs(quad - rec),
                          std::abs(ode - rec)});
      }
    }
    push(res.checks, "w12 three-way agreement on the lattice", worst, ctx.cfg.tol_w12);
  }

  {  // ODE identities at the probes
    double d237 = 0.0, ddet = 0.0, dcons = 0.0, ddir = 0.0;
    for (Complex z : ctx.cfg.probes) {
      const KreinSolution& sol = ctx.solution(z);
      if (z.imag() == 0.0) {
        dcons = std::max(dcons, sol.conservation_defect());
        continue;
      }
      d237 = std::max(d237, sol.identity_defect());
      const CanonicalSystemState st =
          assemble_W(ctx.trajectory(), sol, ctx.cfg.xi_max);
      ddet = std::max(ddet, st.det_defect());
      const Eigen::Matrix2cd direct =
          integrate_W_direct(ctx.trajectory(), z, std::min(8.0, ctx.cfg.xi_max),
                             ctx.cfg.substeps);
      const CanonicalSystemState st8 =
          assemble_W(ctx.trajectory(), sol, std::min(8.0, ctx.cfg.xi_max));
      ddir = std::max(ddir, (direct - st8.W).cwiseAbs().maxCoeff());
    }
    push(res.checks, "P - P* = -i e^{ixz/2} Psi", d237, ctx.cfg.tol_ode);
    push(res.checks, "det W = e^{ixz}", ddet, ctx.cfg.tol_ode);
    push(res.checks, "|P| = |P*| at real probes", dcons, ctx.cfg.tol_ode);
    push(res.checks, "assembled W vs direct integration", ddir, 1e-7);
  }

  res.ms = ms_since(t0);
  return res;
}

// ----------------------------------------------------------- certificate --

SuiteResult run_certificate_suite(Context& ctx, ReportSummary& summary) {
  const auto t0 = Clock::now();
  SuiteResult res;
  res.name = "certificate";
  const SpectralStep& step = ctx.cfg.step;

  CertificateOptions opt;
  opt.xi_max = ctx.cfg.xi_max;
  opt.delta = ctx.cfg.effective_delta();
  opt.probes = ctx.cfg.probes;
  opt.y_grid = ctx.cfg.y_grid;
  opt.percentile = ctx.cfg.percentile;
  opt.substeps = ctx.cfg.substeps;
  opt.panel_order = ctx.cfg.panel_order;

  const NonFactorabilityCertificate cert = certificate(step, opt);
  summary.cert = cert;

  if (step.mu == 0.0) {
    push(res.checks, "gap at the identity", cert.gap, 1e-6);
    push(res.checks, "verdict factorable (identity)",
         cert.verdict == "factorable (identity)" ? 0.0 : 1.0, 0.0);
  } else {
    push(res.checks, "L_fact vs -1/(1-mu)",
         std::abs(cert.L_fact + 1.0 / (1.0 - step.mu)), ctx.cfg.tol_limits);
    push(res.checks, "L_true vs -1", std::abs(cert.L_true + 1.0), ctx.cfg.tol_limits);
    push(res.checks, "gap vs mu/(1-mu)", std::abs(cert.gap - cert.gap_target),
         ctx.cfg.tol_gap);
    push(res.checks, "verdict non-factorable",
         cert.verdict == "non-factorable" ? 0.0 : 1.0, 0.0);
    push(res.checks, "w12 at picks vs -C/Pi", cert.w12_pick_defect,
         ctx.cfg.tol_limits);
  }

  // per-probe solutions for the krein_<tag>.csv tables
  int tag = 0;
  for (Complex z : ctx.cfg.probes) {
    const std::string name = "p" + std::to_string(tag++);
    summary.probe_solutions.emplace_back(name, ctx.solution(z));
  }

  res.ms = ms_since(t0);
  return res;
}

}  // namespace

bool SuiteResult::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

int ReportSummary::passed() const {
  int n = 0;
  for (const auto& s : suites)
    for (const auto& c : s.checks) n += c.pass ? 1 : 0;
  return n;
}

int ReportSummary::failed() const {
  int n = 0;
  for (const auto& s : suites)
    for (const auto& c : s.checks) n += c.pass ? 0 : 1;
  return n;
}

ReportSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  ReportSummary summary;
  summary.config = config;
  Context ctx(config);
  for (const auto& name : config.suites) {
    if (name == "kernel") summary.suites.push_back(run_kernel_suite(ctx));
    else if (name == "section") summary.suites.push_back(run_section_suite(ctx));
    else if (name == "sweep") summary.suites.push_back(run_sweep_suite(ctx, summary));
    else if (name == "pi") summary.suites.push_back(run_pi_suite(ctx, summary));
    else if (name == "certificate")
      summary.suites.push_back(run_certificate_suite(ctx, summary));
    else throw ConfigError("unknown suite: " + name);
  }
  return summary;
}

}  // namespace kreinlab

// Command-line driver: runs the verification suites against a configured
// step density and emits plot-ready CSV tables plus a JSON report.
//
// Exit codes: 0 all checks pass, 1 at least one check failed, 2 bad
// configuration.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "kreinlab/errors.hpp"
#include "kreinlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kreinlab - finite-section laboratory for convolution operators"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  double xi_max = -1.0, delta = -1.0, mu = std::nan("");
  app.add_option("--config", config_path, "configuration file (key = value)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--xi-max", xi_max, "override xi_max");
  app.add_option("--delta", delta, "override the sweep step");
  app.add_option("--mu", mu, "override the coupling");

  for (const char* name : {"kernel", "section", "sweep", "pi", "certificate", "all"})
    app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);

  kreinlab::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = kreinlab::ExperimentConfig::from_file(config_path);
    const auto subs = app.get_subcommands();
    if (!subs.empty() && subs.front()->get_name() != "all")
      cfg.suites = {subs.front()->get_name()};
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (xi_max > 0.0) cfg.xi_max = xi_max;
    if (delta > 0.0) cfg.delta = delta;
    if (!std::isnan(mu)) cfg.step.mu = mu;
    cfg.validate();
  } catch (const kreinlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    const kreinlab::ReportSummary summary = kreinlab::run_experiment(cfg);
    kreinlab::emit_outputs(summary, cfg.out_dir);

    for (const auto& suite : summary.suites) {
      std::printf("suite %-12s (%.0f ms)\n", suite.name.c_str(), suite.ms);
      for (const auto& c : suite.checks)
        std::printf("  [%s] %-45s defect %.3e  tol %.3e\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.defect, c.tol);
    }
    if (summary.cert) {
      const auto& c = *summary.cert;
      std::printf("certificate: L_fact %.6f  L_true %.6f  gap %.6f  verdict %s\n",
                  c.L_fact, c.L_true, c.gap, c.verdict.c_str());
    }
    std::printf("passed %d, failed %d; outputs in %s\n", summary.passed(),
                summary.failed(), cfg.out_dir.c_str());
    return summary.all_pass() ? 0 : 1;
  } catch (const kreinlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const kreinlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

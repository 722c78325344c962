#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kreinlab/certificate.hpp"
#include "kreinlab/finite_section.hpp"
#include "kreinlab/krein_evolution.hpp"
#include "kreinlab/spectral_step.hpp"

namespace kreinlab {

// Plain-text key = value configuration; '#' starts a comment.  Partition
// entries accept "pi" multiples ("pi", "2pi", "0.5pi").  Probes accept
// complex literals ("i", "2i", "1+1i", "1").  The y grid is either an
// explicit list or "geometric:<start>:<stop>:<count>".
struct ExperimentConfig {
  SpectralStep step{{0.0, 3.141592653589793}, {1.0}, 0.5};
  std::string scheme = "uniform";  // identity-check grid: uniform | panels
  double xi_max = 40.0;
  double delta = 0.0;  // 0 -> min(pi/(8 a_n), 0.025)
  double panel_xi = 4.0;
  int panel_order = 16;
  int panel_count = 0;  // 0 -> one panel per unit length
  std::vector<Complex> probes = {{0.0, 1.0}, {0.0, 2.0}, {1.0, 1.0}, {0.0, 0.5}, {1.0, 0.0}};
  std::vector<double> y_grid;  // empty -> geometric 1 .. ~1e-3
  double percentile = 10.0;
  int substeps = 8;
  std::vector<std::string> suites = {"kernel", "section", "sweep", "pi", "certificate"};
  std::string out_dir = "out";
  bool emit_timings = true;

  double tol_traj = 1e-6;
  double tol_ode = 1e-8;
  double tol_w12 = 1e-6;
  double tol_pi = 1e-6;
  double tol_pi_limit = 1e-2;
  double tol_boundary = 1e-3;
  double tol_limits = 5e-2;
  double tol_gap = 1e-1;

  double effective_delta() const;
  static ExperimentConfig from_file(const std::string& path);
  void apply_override(const std::string& key, const std::string& value);
  void validate() const;  // throws ConfigError
};

Complex parse_complex(const std::string& text);  // throws ConfigError

struct PiRow {
  std::string tag;
  Complex z;
  std::string method;
  Complex value;
};

struct SuiteResult {
  std::string name;
  std::vector<IdentityReport> checks;
  double ms = 0.0;
  bool pass() const;
};

struct ReportSummary {
  ExperimentConfig config;
  std::vector<SuiteResult> suites;
  std::optional<KreinTrajectory> trajectory;
  std::vector<double> score;  // |Q|^2 + |P(x, z0)|^2 on the trajectory grid
  std::vector<std::pair<std::string, KreinSolution>> probe_solutions;
  std::vector<PiRow> pi_rows;
  std::optional<NonFactorabilityCertificate> cert;

  int passed() const;
  int failed() const;
  bool all_pass() const { return failed() == 0; }
};

ReportSummary run_experiment(const ExperimentConfig& config);

// CSV files with fixed headers plus report.json; throws IoError.
void emit_outputs(const ReportSummary& summary, const std::string& out_dir);

nlohmann::ordered_json report_json(const ReportSummary& summary);

// Minimal structural validator for report.json; returns false and a reason
// when a required field is missing or mistyped.
bool validate_report_schema(const nlohmann::ordered_json& j, std::string* why = nullptr);

}  // namespace kreinlab

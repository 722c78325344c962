#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kreinlab/errors.hpp"
#include "kreinlab/runner.hpp"

namespace kreinlab {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

nlohmann::ordered_json complex_json(Complex z) {
  return {{"re", z.real()}, {"im", z.imag()}};
}

}  // namespace

nlohmann::ordered_json report_json(const ReportSummary& summary) {
  nlohmann::ordered_json j;
  const auto& cfg = summary.config;

  nlohmann::ordered_json jc;
  jc["partition"] = cfg.step.partition;
  jc["coeffs"] = cfg.step.coeffs;
  jc["mu"] = cfg.step.mu;
  jc["scheme"] = cfg.scheme;
  jc["xi_max"] = cfg.xi_max;
  jc["delta"] = cfg.effective_delta();
  jc["panel_xi"] = cfg.panel_xi;
  jc["panel_order"] = cfg.panel_order;
  {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Complex z : cfg.probes) arr.push_back(complex_json(z));
    jc["probes"] = arr;
  }
  jc["percentile"] = cfg.percentile;
  jc["substeps"] = cfg.substeps;
  jc["suites"] = cfg.suites;
  jc["out"] = cfg.out_dir;
  j["config"] = jc;

  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  for (const auto& s : summary.suites) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : s.checks)
      checks.push_back({{"name", c.name},
                        {"defect", c.defect},
                        {"tol", c.tol},
                        {"pass", c.pass}});
    js["checks"] = checks;
    suites.push_back(js);
  }
  j["suites"] = suites;

  if (summary.cert) {
    const auto& c = *summary.cert;
    nlohmann::ordered_json jcert;
    jcert["mu"] = c.mu;
    jcert["C"] = c.C;
    jcert["L_fact"] = c.L_fact;
    jcert["L_true"] = c.L_true;
    jcert["gap"] = c.gap;
    jcert["gap_target"] = c.gap_target;
    jcert["resolution"] = c.resolution;
    jcert["w12_pick_defect"] = c.w12_pick_defect;
    jcert["verdict"] = c.verdict;
    nlohmann::ordered_json probes = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < c.pi_prod.size(); ++i)
      probes.push_back({{"pi_product", complex_json(c.pi_prod[i])},
                        {"pi_integral", complex_json(c.pi_int[i])},
                        {"pi_limit", complex_json(c.pi_lim[i])},
                        {"pi_limit_spread", c.pi_lim_spread[i]},
                        {"G_at_xi_max", complex_json(c.G_at_xi_max[i])}});
    jcert["probes"] = probes;
    j["certificate"] = jcert;
  } else {
    j["certificate"] = nullptr;
  }

  j["summary"] = {{"passed", summary.passed()}, {"failed", summary.failed()}};

  if (summary.config.emit_timings) {
    nlohmann::ordered_json t;
    for (const auto& s : summary.suites) t[s.name] = s.ms;
    j["timings"] = t;
  }
  return j;
}

bool validate_report_schema(const nlohmann::ordered_json& j, std::string* why) {
  auto fail = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  if (!j.is_object()) return fail("report must be an object");
  if (!j.contains("config") || !j["config"].is_object()) return fail("config missing");
  const auto& cfg = j["config"];
  for (const char* key : {"partition", "coeffs", "probes", "suites"})
    if (!cfg.contains(key) || !cfg[key].is_array())
      return fail(std::string("config.") + key + " must be an array");
  for (const char* key : {"mu", "xi_max", "delta", "percentile"})
    if (!cfg.contains(key) || !cfg[key].is_number())
      return fail(std::string("config.") + key + " must be a number");
  if (!j.contains("suites") || !j["suites"].is_array()) return fail("suites missing");
  for (const auto& s : j["suites"]) {
    if (!s.contains("name") || !s["name"].is_string()) return fail("suite name");
    if (!s.contains("checks") || !s["checks"].is_array()) return fail("suite checks");
    for (const auto& c : s["checks"]) {
      if (!c.contains("name") || !c["name"].is_string()) return fail("check name");
      if (!c.contains("defect") || !c["defect"].is_number()) return fail("check defect");
      if (!c.contains("tol") || !c["tol"].is_number()) return fail("check tol");
      if (!c.contains("pass") || !c["pass"].is_boolean()) return fail("check pass");
    }
  }
  if (!j.contains("certificate")) return fail("certificate missing");
  if (!j["certificate"].is_null()) {
    const auto& c = j["certificate"];
    for (const char* key : {"L_fact", "L_true", "gap", "gap_target", "resolution"})
      if (!c.contains(key) || !c[key].is_number())
        return fail(std::string("certificate.") + key + " must be a number");
    if (!c.contains("verdict") || !c["verdict"].is_string())
      return fail("certificate.verdict must be a string");
  }
  if (!j.contains("summary") || !j["summary"].is_object() ||
      !j["summary"].contains("passed") || !j["summary"].contains("failed"))
    return fail("summary missing");
  return true;
}

void emit_outputs(const ReportSummary& summary, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir);
  const fs::path base(out_dir);

  if (summary.trajectory) {
    const auto& traj = *summary.trajectory;
    auto f = open_out(base / "sweep.csv");
    f << "x,B,q1_exp,q1_direct,q2,Q,score\n";
    for (std::size_t j = 0; j < traj.x.size(); ++j) {
      const double q1e = traj.q1_exp.empty() ? traj.q1_direct[j] : traj.q1_exp[j];
      const double score = j < summary.score.size() ? summary.score[j] : 0.0;
      f << fmt(traj.x[j]) << ',' << fmt(traj.B[j]) << ',' << fmt(q1e) << ','
        << fmt(traj.q1_direct[j]) << ',' << fmt(traj.q2_direct[j]) << ','
        << fmt(traj.Q[j]) << ',' << fmt(score) << '\n';
    }
  }

  for (const auto& [tag, sol] : summary.probe_solutions) {
    auto f = open_out(base / ("krein_" + tag + ".csv"));
    f << "x,re_P,im_P,re_Pstar,im_Pstar\n";
    for (std::size_t j = 0; j < sol.x.size(); ++j)
      f << fmt(sol.x[j]) << ',' << fmt(sol.P[j].real()) << ',' << fmt(sol.P[j].imag())
        << ',' << fmt(sol.Pstar[j].real()) << ',' << fmt(sol.Pstar[j].imag()) << '\n';
  }

  if (!summary.pi_rows.empty()) {
    auto f = open_out(base / "pi.csv");
    f << "tag,re_z,im_z,method,re_val,im_val\n";
    for (const auto& row : summary.pi_rows)
      f << row.tag << ',' << fmt(row.z.real()) << ',' << fmt(row.z.imag()) << ','
        << row.method << ',' << fmt(row.value.real()) << ',' << fmt(row.value.imag())
        << '\n';
  }

  if (summary.cert) {
    const auto& c = *summary.cert;
    auto f = open_out(base / "certificate.csv");
    f << "y,re_CPi,im_CPi,re_Gbar,im_Gbar\n";
    for (std::size_t i = 0; i < c.y_grid.size(); ++i)
      f << fmt(c.y_grid[i]) << ',' << fmt(c.c_pi[i].real()) << ','
        << fmt(c.c_pi[i].imag()) << ',' << fmt(c.g_bar[i].real()) << ','
        << fmt(c.g_bar[i].imag()) << '\n';
  }

  auto f = open_out(base / "report.json");
  f << report_json(summary).dump(2) << '\n';
}

}  // namespace kreinlab

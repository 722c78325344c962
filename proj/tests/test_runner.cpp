#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kreinlab/errors.hpp"
#include "kreinlab/runner.hpp"

using namespace kreinlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path write_config(const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / "kreinlab_test.cfg";
  std::ofstream f(p);
  f << body;
  return p;
}

}  // namespace

TEST_CASE("complex literals") {
  CHECK(parse_complex("i") == Complex(0.0, 1.0));
  CHECK(parse_complex("-i") == Complex(0.0, -1.0));
  CHECK(parse_complex("2i") == Complex(0.0, 2.0));
  CHECK(parse_complex("0.5i") == Complex(0.0, 0.5));
  CHECK(parse_complex("1+1i") == Complex(1.0, 1.0));
  CHECK(parse_complex("1.5-0.25i") == Complex(1.5, -0.25));
  CHECK(parse_complex("3") == Complex(3.0, 0.0));
  CHECK_THROWS_AS(parse_complex("zebra"), ConfigError);
}

TEST_CASE("config parsing") {
  const auto p = write_config(
      "# comment\n"
      "partition = 0, pi, 2pi\n"
      "coeffs = 1, -0.5\n"
      "mu = 0.5\n"
      "xi_max = 12\n"
      "delta = 0.05\n"
      "probes = i, 1+1i\n"
      "y_grid = geometric:1:0.01:5\n"
      "suites = kernel\n");
  const ExperimentConfig cfg = ExperimentConfig::from_file(p.string());
  CHECK(cfg.step.partition.size() == 3);
  CHECK(cfg.step.partition[2] == doctest::Approx(2.0 * 3.14159265358979).epsilon(1e-12));
  CHECK(cfg.step.coeffs[1] == -0.5);
  CHECK(cfg.probes.size() == 2);
  CHECK(cfg.y_grid.size() == 5);
  CHECK(cfg.y_grid.front() == doctest::Approx(1.0));
  CHECK(cfg.y_grid.back() == doctest::Approx(0.01));
  CHECK(cfg.suites == std::vector<std::string>{"kernel"});

  // malformed partition rejects at load
  const auto bad = write_config("partition = 0, -1\ncoeffs = 1\nmu = 0.5\n");
  CHECK_THROWS_AS(ExperimentConfig::from_file(bad.string()), ConfigError);
  const auto unknown = write_config("no_such_key = 1\n");
  CHECK_THROWS_AS(ExperimentConfig::from_file(unknown.string()), ConfigError);

  ExperimentConfig tight;
  tight.xi_max = 0.1;
  CHECK_THROWS_AS(tight.validate(), ConfigError);
}

TEST_CASE("default delta resolves the top frequency") {
  ExperimentConfig cfg;
  CHECK(cfg.effective_delta() == 0.025);
  cfg.step.partition = {0.0, 40.0};
  CHECK(cfg.effective_delta() < 0.01);
}

TEST_CASE("outputs and determinism") {
  ExperimentConfig cfg;
  cfg.xi_max = 10.0;
  cfg.delta = 0.05;
  cfg.suites = {"sweep", "pi", "certificate"};
  cfg.probes = {{0.0, 1.0}, {1.0, 0.0}};
  cfg.validate();

  const ReportSummary s1 = run_experiment(cfg);
  const ReportSummary s2 = run_experiment(cfg);

  namespace fs = std::filesystem;
  const fs::path d1 = fs::temp_directory_path() / "kreinlab_out1";
  const fs::path d2 = fs::temp_directory_path() / "kreinlab_out2";
  emit_outputs(s1, d1.string());
  emit_outputs(s2, d2.string());

  // sweep.csv rows = grid size (+ header)
  {
    std::ifstream f(d1 / "sweep.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(f, line))
      if (!line.empty()) ++rows;
    CHECK(rows == s1.trajectory->x.size() + 1);
  }

  // one boundary row per y in pi.csv
  {
    std::ifstream f(d1 / "pi.csv");
    std::string line;
    std::size_t boundary_rows = 0;
    while (std::getline(f, line))
      if (line.rfind("boundary,", 0) == 0) ++boundary_rows;
    CHECK(boundary_rows == 11);  // default geometric grid
  }

  // certificate table rows
  {
    std::ifstream f(d1 / "certificate.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(f, line))
      if (!line.empty()) ++rows;
    CHECK(rows == s1.cert->y_grid.size() + 1);
  }

  // byte-identical CSV outputs across runs
  for (const char* name : {"sweep.csv", "pi.csv", "certificate.csv", "krein_p0.csv"})
    CHECK(slurp(d1 / name) == slurp(d2 / name));

  // JSON identical up to the timing subtree; schema round-trip
  auto j1 = report_json(s1);
  auto j2 = report_json(s2);
  std::string why;
  CHECK(validate_report_schema(j1, &why));
  INFO(why);
  auto parsed = nlohmann::ordered_json::parse(slurp(d1 / "report.json"));
  CHECK(validate_report_schema(parsed, &why));
  j1.erase("timings");
  j2.erase("timings");
  CHECK(j1.dump() == j2.dump());

  // the validator rejects a broken report
  auto broken = j1;
  broken.erase("suites");
  CHECK_FALSE(validate_report_schema(broken, &why));
}

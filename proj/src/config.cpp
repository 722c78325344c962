#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kreinlab/errors.hpp"
#include "kreinlab/runner.hpp"

namespace kreinlab {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  const auto pos = t.find("pi");
  try {
    if (pos != std::string::npos && pos + 2 == t.size()) {
      const std::string pre = trim(t.substr(0, pos));
      double factor = 1.0;
      if (pre == "-") factor = -1.0;
      else if (!pre.empty()) factor = std::stod(pre);
      return factor * std::numbers::pi;
    }
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw ConfigError("trailing characters in number: " + text);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number: " + text);
  }
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) out.push_back(parse_real(tok));
  return out;
}

std::vector<double> parse_y_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("geometric:", 0) == 0) {
    const auto parts = split(t.substr(10), ':');
    if (parts.size() != 3) throw ConfigError("geometric grid needs start:stop:count");
    const double start = parse_real(parts[0]);
    const double stop = parse_real(parts[1]);
    const int count = static_cast<int>(parse_real(parts[2]));
    if (!(start > stop) || !(stop > 0.0) || count < 2)
      throw ConfigError("geometric grid needs start > stop > 0 and count >= 2");
    std::vector<double> y(count);
    const double r = std::pow(stop / start, 1.0 / (count - 1));
    y[0] = start;
    for (int i = 1; i < count; ++i) y[i] = y[i - 1] * r;
    return y;
  }
  return parse_reals(t);
}

}  // namespace

Complex parse_complex(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty complex literal");
  // forms: "a", "bi", "i", "-i", "a+bi", "a-bi"
  if (t.back() == 'i') {
    t.pop_back();
    // find the sign splitting real and imaginary parts (skip a leading sign)
    std::size_t pos = std::string::npos;
    for (std::size_t k = 1; k < t.size(); ++k)
      if ((t[k] == '+' || t[k] == '-') &&
          !(k > 0 && (t[k - 1] == 'e' || t[k - 1] == 'E')))
        pos = k;
    if (pos == std::string::npos) {
      const std::string im = trim(t);
      if (im.empty() || im == "+") return {0.0, 1.0};
      if (im == "-") return {0.0, -1.0};
      return {0.0, parse_real(im)};
    }
    const double re = parse_real(t.substr(0, pos));
    std::string im = trim(t.substr(pos));
    if (im == "+") im = "1";
    if (im == "-") im = "-1";
    return {re, parse_real(im)};
  }
  return {parse_real(t), 0.0};
}

double ExperimentConfig::effective_delta() const {
  if (delta > 0.0) return delta;
  return std::min(std::numbers::pi / (8.0 * step.a_max()), 0.025);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    cfg.apply_override(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

void ExperimentConfig::apply_override(const std::string& key, const std::string& value) {
  if (key == "partition") step.partition = parse_reals(value);
  else if (key == "coeffs") step.coeffs = parse_reals(value);
  else if (key == "mu") step.mu = parse_real(value);
  else if (key == "scheme") scheme = value;
  else if (key == "xi_max") xi_max = parse_real(value);
  else if (key == "delta") delta = parse_real(value);
  else if (key == "panel_xi") panel_xi = parse_real(value);
  else if (key == "panel_order") panel_order = static_cast<int>(parse_real(value));
  else if (key == "panel_count") panel_count = static_cast<int>(parse_real(value));
  else if (key == "probes") {
    probes.clear();
    for (const auto& tok : split(value, ',')) probes.push_back(parse_complex(tok));
  } else if (key == "y_grid") y_grid = parse_y_grid(value);
  else if (key == "percentile") percentile = parse_real(value);
  else if (key == "substeps") substeps = static_cast<int>(parse_real(value));
  else if (key == "suites") {
    suites.clear();
    for (const auto& tok : split(value, ','))
      if (tok == "all") suites = {"kernel", "section", "sweep", "pi", "certificate"};
      else suites.push_back(tok);
  } else if (key == "out") out_dir = value;
  else if (key == "emit_timings") emit_timings = (value == "true" || value == "1");
  else if (key == "tol_traj") tol_traj = parse_real(value);
  else if (key == "tol_ode") tol_ode = parse_real(value);
  else if (key == "tol_w12") tol_w12 = parse_real(value);
  else if (key == "tol_pi") tol_pi = parse_real(value);
  else if (key == "tol_pi_limit") tol_pi_limit = parse_real(value);
  else if (key == "tol_boundary") tol_boundary = parse_real(value);
  else if (key == "tol_limits") tol_limits = parse_real(value);
  else if (key == "tol_gap") tol_gap = parse_real(value);
  else throw ConfigError("unknown configuration key: " + key);
}

void ExperimentConfig::validate() const {
  try {
    step.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid spectral step: ") + e.what());
  }
  for (double t : {tol_traj, tol_ode, tol_w12, tol_pi, tol_pi_limit, tol_boundary,
                   tol_limits, tol_gap})
    if (!(t > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(xi_max >= 10.0 * effective_delta()))
    throw ConfigError("xi_max must be at least 10 grid steps");
  if (!(panel_xi > 0.0) || panel_order < 2) throw ConfigError("invalid panel settings");
  if (substeps < 1) throw ConfigError("substeps must be >= 1");
  for (const auto& s : suites)
    if (s != "kernel" && s != "section" && s != "sweep" && s != "pi" &&
        s != "certificate")
      throw ConfigError("unknown suite: " + s);
  for (std::size_t i = 1; i < y_grid.size(); ++i)
    if (!(y_grid[i] < y_grid[i - 1]) || !(y_grid[i] > 0.0))
      throw ConfigError("y_grid must be positive and decreasing");
}

}  // namespace kreinlab

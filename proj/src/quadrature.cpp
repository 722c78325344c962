#include "kreinlab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "kreinlab/errors.hpp"
#include "kreinlab/numerics.hpp"

namespace kreinlab {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  return {x, w};
}

double neville_to_zero(std::span<const double> xs, std::span<const double> fs) {
  const std::size_t n = xs.size();
  std::vector<double> t(fs.begin(), fs.end());
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      t[i] = t[i] + (0.0 - xs[i]) * (t[i + 1] - t[i]) / (xs[i + m] - xs[i]);
  return t[0];
}

double lagrange_uniform(std::span<const double> f, double x0, double dx, double x) {
  const std::size_t n = f.size();
  const int order = static_cast<int>(std::min<std::size_t>(8, n));
  const double u = (x - x0) / dx;
  long j0 = static_cast<long>(std::floor(u)) - order / 2 + 1;
  j0 = std::max(0L, std::min(j0, static_cast<long>(n) - order));
  // exact hit on a node
  const long jn = static_cast<long>(std::llround(u));
  if (jn >= 0 && jn < static_cast<long>(n) && std::abs(u - jn) < 1e-12)
    return f[static_cast<std::size_t>(jn)];
  double num = 0.0, den = 0.0;
  // barycentric weights for a uniform stencil: (-1)^i C(order-1, i)
  double bw = 1.0;
  for (int i = 0; i < order; ++i) {
    const double diff = u - (j0 + i);
    const double term = bw / diff;
    num += term * f[static_cast<std::size_t>(j0 + i)];
    den += term;
    bw *= -static_cast<double>(order - 1 - i) / static_cast<double>(i + 1);
  }
  return num / den;
}

double sinc_over_x(double c, double x) {
  const double cx = c * x;
  if (std::abs(cx) < 1e-4) {
    const double s = cx * cx;
    return c * (1.0 - s / 6.0 * (1.0 - s / 20.0));
  }
  return std::sin(cx) / x;
}

QuadratureGrid QuadratureGrid::uniform(double xi, int n_nodes) {
  if (!(xi > 0.0) || n_nodes < 2)
    throw InvalidStep("uniform grid needs xi > 0 and at least two nodes");
  QuadratureGrid g;
  g.scheme = Scheme::UniformTrapezoid;
  g.xi = xi;
  g.step = xi / (n_nodes - 1);
  g.nodes.resize(n_nodes);
  g.weights.assign(n_nodes, g.step);
  for (int j = 0; j < n_nodes; ++j) g.nodes[j] = j * g.step;
  g.nodes.back() = xi;
  g.weights.front() = g.weights.back() = g.step / 2.0;
  return g;
}

QuadratureGrid QuadratureGrid::panels(double xi, int n_panels, int order) {
  if (!(xi > 0.0) || n_panels < 1 || order < 2)
    throw InvalidStep("panel grid needs xi > 0, panels >= 1, order >= 2");
  QuadratureGrid g;
  g.scheme = Scheme::GaussLegendrePanels;
  g.xi = xi;
  g.panel_order = order;
  const auto [xg, wg] = gauss_legendre(order);
  const double len = xi / n_panels;
  g.nodes.reserve(static_cast<std::size_t>(n_panels) * order);
  g.weights.reserve(static_cast<std::size_t>(n_panels) * order);
  for (int p = 0; p < n_panels; ++p) {
    const double a = p * len, b = (p + 1) * len;
    for (int k = 0; k < order; ++k) {
      g.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * xg[k]);
      g.weights.push_back(0.5 * (b - a) * wg[k]);
    }
  }
  return g;
}

void QuadratureGrid::validate() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sum += weights[i];
    if (weights[i] <= 0.0) throw InvalidStep("grid weight not positive");
    if (i > 0 && nodes[i] <= nodes[i - 1])
      throw InvalidStep("grid nodes not strictly ascending");
  }
  if (std::abs(sum - xi) > 1e-12 * std::max(1.0, xi))
    throw InvalidStep("grid weights do not sum to xi");
  if (scheme == Scheme::UniformTrapezoid) {
    for (std::size_t i = 1; i < nodes.size(); ++i)
      if (std::abs(nodes[i] - nodes[i - 1] - step) > 1e-12)
        throw InvalidStep("uniform grid spacing not constant");
  }
}

}  // namespace kreinlab

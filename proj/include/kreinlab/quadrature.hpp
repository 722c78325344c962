#pragma once

#include <vector>

namespace kreinlab {

// Discretization grid for a finite section on [0, xi].
//
// Two schemes: uniform trapezoid (keeps the kernel matrix Toeplitz up to a
// rank-2 endpoint correction, enables the Levinson path) and panelled
// Gauss-Legendre (open nodes, spectral accuracy for fixed-xi identity
// checks).
struct QuadratureGrid {
  enum class Scheme { UniformTrapezoid, GaussLegendrePanels };

  Scheme scheme = Scheme::UniformTrapezoid;
  double xi = 0.0;
  std::vector<double> nodes;    // ascending in [0, xi]
  std::vector<double> weights;  // positive, sum to xi
  double step = 0.0;            // spacing, uniform scheme only
  int panel_order = 0;          // panels scheme only

  static QuadratureGrid uniform(double xi, int n_nodes);
  static QuadratureGrid panels(double xi, int n_panels, int order = 16);

  std::size_t size() const { return nodes.size(); }
  void validate() const;  // weight sum, ordering, spacing invariants
};

}  // namespace kreinlab

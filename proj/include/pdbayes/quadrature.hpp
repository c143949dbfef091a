#pragma once

#include <functional>
#include <vector>

#include "pdbayes/types.hpp"

namespace pdbayes {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

struct Box {
  Vector2d lo;
  Vector2d hi;

  double area() const { return (hi - lo).prod(); }
};

struct QuadratureOptions {
  double abs_tol = 1e-9;
  // Effective tolerance is min(abs_tol, rel_tol * |coarse estimate|).
  double rel_tol = 0.0;
  // Cells of the starting partition are no wider than this.
  double initial_cell = 1.0;
  int order = 8;
  int max_depth = 14;
};

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  double tolerance = 0;
  bool converged = true;
};

// Adaptive tensor-product Gauss-Legendre: a cell is accepted when the
// single-cell rule and the four-quadrant rule agree to within the cell's
// share of the tolerance; otherwise the quadrants are refined.
QuadratureResult integrate_2d(const std::function<double(const Vector2d&)>& f, const Box& box,
                              const QuadratureOptions& options = {});

}  // namespace pdbayes

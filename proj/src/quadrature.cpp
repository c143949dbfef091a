#include "pdbayes/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pdbayes/error.hpp"

namespace pdbayes {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  return rule;
}

namespace {

class Integrator {
 public:
  Integrator(const std::function<double(const Vector2d&)>& f, const QuadratureOptions& options)
      : f_(f), options_(options), rule_(gauss_legendre(options.order)) {}

  double cell(const Box& b) const {
    const Vector2d half = 0.5 * (b.hi - b.lo);
    const Vector2d mid = 0.5 * (b.hi + b.lo);
    double sum = 0;
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
      double row = 0;
      for (std::size_t j = 0; j < rule_.nodes.size(); ++j) {
        const Vector2d x(mid(0) + half(0) * rule_.nodes[i], mid(1) + half(1) * rule_.nodes[j]);
        row += rule_.weights[j] * f_(x);
      }
      sum += rule_.weights[i] * row;
    }
    return sum * half.prod();
  }

  // Returns the refined value of `b`, given its single-cell estimate.
  double refine(const Box& b, double coarse, double tol, int depth, QuadratureResult& result) const {
    const Vector2d mid = 0.5 * (b.lo + b.hi);
    const Box quads[4] = {{b.lo, mid},
                          {Vector2d(mid(0), b.lo(1)), Vector2d(b.hi(0), mid(1))},
                          {Vector2d(b.lo(0), mid(1)), Vector2d(mid(0), b.hi(1))},
                          {mid, b.hi}};
    double parts[4];
    double fine = 0;
    for (int k = 0; k < 4; ++k) {
      parts[k] = cell(quads[k]);
      fine += parts[k];
    }
    const double err = std::abs(fine - coarse);
    // Below roundoff the two rules cannot agree any better.
    if (err <= tol || err <= 64 * std::numeric_limits<double>::epsilon() * std::abs(fine)) {
      result.error_estimate += err;
      return fine;
    }
    if (depth >= options_.max_depth) {
      result.converged = false;
      result.error_estimate += err;
      return fine;
    }
    double sum = 0;
    for (int k = 0; k < 4; ++k) sum += refine(quads[k], parts[k], tol / 4, depth + 1, result);
    return sum;
  }

 private:
  const std::function<double(const Vector2d&)>& f_;
  const QuadratureOptions& options_;
  GaussLegendreRule rule_;
};

}  // namespace

QuadratureResult integrate_2d(const std::function<double(const Vector2d&)>& f, const Box& box,
                              const QuadratureOptions& options) {
  QuadratureResult result;
  const Vector2d extent = box.hi - box.lo;
  if (!(extent(0) > 0) || !(extent(1) > 0)) return result;
  if (!(options.initial_cell > 0)) throw DomainError("integrate_2d: initial_cell must be positive");

  const int nx = std::max(1, static_cast<int>(std::ceil(extent(0) / options.initial_cell)));
  const int ny = std::max(1, static_cast<int>(std::ceil(extent(1) / options.initial_cell)));
  Integrator integrator(f, options);

  std::vector<Box> cells;
  std::vector<double> coarse;
  cells.reserve(static_cast<std::size_t>(nx) * ny);
  double estimate = 0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const Vector2d lo(box.lo(0) + extent(0) * i / nx, box.lo(1) + extent(1) * j / ny);
      const Vector2d hi(i + 1 == nx ? box.hi(0) : box.lo(0) + extent(0) * (i + 1) / nx,
                        j + 1 == ny ? box.hi(1) : box.lo(1) + extent(1) * (j + 1) / ny);
      cells.push_back({lo, hi});
      coarse.push_back(integrator.cell(cells.back()));
      estimate += coarse.back();
    }
  }

  double tol = options.abs_tol;
  if (options.rel_tol > 0 && estimate != 0) tol = std::min(tol, options.rel_tol * std::abs(estimate));
  result.tolerance = tol;
  const double cell_tol = tol / static_cast<double>(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    result.value += integrator.refine(cells[k], coarse[k], cell_tol, 0, result);
  }
  if (result.error_estimate > tol) result.converged = false;
  return result;
}

}  // namespace pdbayes

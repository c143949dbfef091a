#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pdbayes/diagram.hpp"
#include "pdbayes/intensity.hpp"
#include "pdbayes/quadrature.hpp"

namespace pdbayes {

// Detection probability, likelihood kernel N*(y; x, likelihood_variance I),
// and clutter intensity of the spurious observed features.
struct ObservationModel {
  double alpha = 1.0;
  double likelihood_variance = 0.1;
  Mixture clutter;

  void validate() const;
};

// One observed point y and its mixture of conjugate-updated components.
struct ObservationTerm {
  Vector2d observation;
  double clutter_density = 0;  // clutter(y)
  double denominator = 0;      // clutter(y) + alpha * sum_j w_j Q_j
  std::vector<Component> components;  // weight = C_j^y, mean = mu_j^y, variance = sigma_j^y
  std::vector<double> wedge_masses;   // Q_j^y

  // alpha * sum_j w_j Q_j / denominator: expected number of latent features
  // behind this observation. Lies in [0, 1].
  double detected_mass(double alpha) const;
};

// (1 - alpha) prior(x) + (alpha / m) sum_y sum_j C_j^y N*(x; mu_j^y, sigma_j^y I).
// Stored structurally so the prior-retention term stays exact.
class PosteriorIntensity {
 public:
  PosteriorIntensity(Mixture prior, double alpha, std::size_t observation_count,
                     std::vector<ObservationTerm> terms);

  const Mixture& prior() const { return prior_; }
  double alpha() const { return alpha_; }
  double retention_scale() const { return 1.0 - alpha_; }
  std::size_t observation_count() const { return m_; }
  const std::vector<ObservationTerm>& terms() const { return terms_; }

  double evaluate(const Vector2d& x) const;
  double log_evaluate(const Vector2d& x) const;

  // (1 - alpha) * prior mass.
  double retention_mass() const;
  // (alpha / m) * sum_y sum_j C_j^y Q_j^y.
  double data_mass() const;
  double total_mass() const { return retention_mass() + data_mass(); }

  // The posterior flattened into a single mixture (retention components
  // first, then data components in term order). Zero-weight parts omitted.
  Mixture flatten() const;

 private:
  Mixture prior_;
  double alpha_;
  std::size_t m_;
  std::vector<ObservationTerm> terms_;
};

// Conjugate update of a Gaussian-mixture prior. Observations must be tilted;
// all of their features are used (restrict to one homology dimension first).
// Observed points are processed in sorted order, so permutations of the
// input give bitwise-identical results.
PosteriorIntensity posterior_closed_form(const Mixture& prior, const ObservationModel& model,
                                         const std::vector<PersistenceDiagram>& observations);

// Regular evaluation grid; x runs along columns, y along rows.
struct Grid {
  double x0 = 0, x1 = 3, y0 = 0, y1 = 3;
  int nx = 200, ny = 200;

  double x(int i) const { return nx == 1 ? x0 : x0 + (x1 - x0) * i / (nx - 1); }
  double y(int j) const { return ny == 1 ? y0 : y0 + (y1 - y0) * j / (ny - 1); }
  void validate() const;
};

// Values laid out as (ny rows, nx columns).
Eigen::MatrixXd evaluate_function_on_grid(const std::function<double(const Vector2d&)>& f, const Grid& grid);

template <typename Intensity>
Eigen::MatrixXd evaluate_on_grid(const Intensity& intensity, const Grid& grid) {
  return evaluate_function_on_grid([&](const Vector2d& x) { return intensity.evaluate(x); }, grid);
}

struct OracleOptions {
  QuadratureOptions quadrature{.abs_tol = 1e-9, .rel_tol = 1e-11};
  // Finest length scale present in the prior; bounds the starting cell size.
  double prior_length_scale = 1.0;
  // Half-width of the integration window around y, in likelihood std devs.
  double window_sigmas = 8.0;
  // Region outside which the prior is negligible. When set, each integral
  // covers the hull of this box and the window, which matters when y sits in
  // the far tail of the prior and the integrand peaks away from y.
  std::optional<Box> prior_support;
};

// Box covering every component mean +- `sigmas` standard deviations,
// clipped to the wedge.
Box mixture_support(const Mixture& m, double sigmas = 8.0);

// Direct evaluation of the general posterior-intensity formula with a
// black-box prior and a spatially varying detection probability; the
// normalizing integral per observed point is computed by adaptive
// quadrature. Throws NumericalError if a quadrature does not converge.
Eigen::MatrixXd posterior_numeric_oracle(const std::function<double(const Vector2d&)>& prior,
                                         const std::function<double(const Vector2d&)>& alpha,
                                         const ObservationModel& model,
                                         const std::vector<PersistenceDiagram>& observations,
                                         const Grid& grid, const OracleOptions& options = {});

// Constant-alpha convenience overload (uses model.alpha).
Eigen::MatrixXd posterior_numeric_oracle(const std::function<double(const Vector2d&)>& prior,
                                         const ObservationModel& model,
                                         const std::vector<PersistenceDiagram>& observations,
                                         const Grid& grid, const OracleOptions& options = {});

// Posterior on the grid divided by its maximum; all zeros if the field is 0.
Eigen::MatrixXd scaled_intensity_grid(const PosteriorIntensity& posterior, const Grid& grid);
Eigen::MatrixXd scale_to_unit_max(Eigen::MatrixXd values);

// Trapezoid-rule integral of grid values.
double trapezoid_integral(const Eigen::MatrixXd& values, const Grid& grid);

// CSV: header "y\x,<x_0>,...", then one row per y: "<y_j>,<v_j0>,...".
std::string format_grid_csv(const Eigen::MatrixXd& values, const Grid& grid);

}  // namespace pdbayes

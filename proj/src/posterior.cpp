#include "pdbayes/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "pdbayes/error.hpp"
#include "pdbayes/format.hpp"

namespace pdbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

bool lexicographic_less(const Vector2d& a, const Vector2d& b) {
  return a(0) != b(0) ? a(0) < b(0) : a(1) < b(1);
}

std::string describe(const Vector2d& y) {
  return "(" + format_double(y(0)) + ", " + format_double(y(1)) + ")";
}

std::vector<Vector2d> sorted_observation_points(const std::vector<PersistenceDiagram>& observations) {
  std::vector<Vector2d> points;
  for (const auto& d : observations) {
    if (d.frame != Frame::Tilted) throw DomainError("posterior: observed diagrams must be tilted");
    for (const auto& f : d.features) points.push_back(f.point);
  }
  std::sort(points.begin(), points.end(), lexicographic_less);
  return points;
}

double log_sum_exp(const std::vector<double>& logs) {
  double peak = kNegInf;
  for (double l : logs) peak = std::max(peak, l);
  if (peak == kNegInf) return kNegInf;
  double sum = 0;
  for (double l : logs) sum += std::exp(l - peak);
  return peak + std::log(sum);
}

}  // namespace

void ObservationModel::validate() const {
  if (!(alpha >= 0 && alpha <= 1)) throw DomainError("observation model: alpha must lie in [0, 1]");
  if (!(likelihood_variance > 0) || !std::isfinite(likelihood_variance)) {
    throw DomainError("observation model: likelihood variance must be positive");
  }
  for (const auto& c : clutter.components()) c.validate();
}

double ObservationTerm::detected_mass(double alpha) const {
  if (alpha == 0) return 0;
  double wq = 0;
  for (std::size_t j = 0; j < components.size(); ++j) wq += components[j].weight * wedge_masses[j];
  return alpha * wq;
}

PosteriorIntensity::PosteriorIntensity(Mixture prior, double alpha, std::size_t observation_count,
                                       std::vector<ObservationTerm> terms)
    : prior_(std::move(prior)), alpha_(alpha), m_(observation_count), terms_(std::move(terms)) {
  if (m_ == 0) throw DomainError("posterior needs at least one observed diagram");
}

double PosteriorIntensity::evaluate(const Vector2d& x) const {
  if (!in_wedge(x)) return 0;
  const double retention = alpha_ == 1.0 ? 0.0 : (1.0 - alpha_) * prior_.evaluate(x);
  if (terms_.empty()) return retention;
  std::vector<double> per_term;
  per_term.reserve(terms_.size());
  for (const auto& t : terms_) {
    double s = 0;
    for (const auto& c : t.components) s += c.weight * gaussian_density(x, c.mean, c.variance);
    per_term.push_back(s);
  }
  return retention + alpha_ / static_cast<double>(m_) * pairwise_sum(per_term);
}

double PosteriorIntensity::log_evaluate(const Vector2d& x) const {
  if (!in_wedge(x)) return kNegInf;
  std::vector<double> logs;
  if (alpha_ < 1.0) {
    const double log_scale = std::log1p(-alpha_);
    for (const auto& c : prior_.components()) {
      logs.push_back(log_scale + std::log(c.weight) + log_gaussian_density(x, c.mean, c.variance));
    }
  }
  if (alpha_ > 0.0) {
    const double log_scale = std::log(alpha_ / static_cast<double>(m_));
    for (const auto& t : terms_) {
      for (const auto& c : t.components) {
        if (c.weight > 0) {
          logs.push_back(log_scale + std::log(c.weight) + log_gaussian_density(x, c.mean, c.variance));
        }
      }
    }
  }
  return log_sum_exp(logs);
}

double PosteriorIntensity::retention_mass() const { return (1.0 - alpha_) * prior_.total_mass(); }

double PosteriorIntensity::data_mass() const {
  std::vector<double> per_term;
  per_term.reserve(terms_.size());
  for (const auto& t : terms_) {
    double s = 0;
    for (std::size_t j = 0; j < t.components.size(); ++j) s += t.components[j].weight * t.wedge_masses[j];
    per_term.push_back(s);
  }
  return alpha_ / static_cast<double>(m_) * pairwise_sum(per_term);
}

Mixture PosteriorIntensity::flatten() const {
  std::vector<Component> out;
  if (alpha_ < 1.0) {
    for (auto c : prior_.components()) {
      c.weight *= 1.0 - alpha_;
      out.push_back(c);
    }
  }
  const double scale = alpha_ / static_cast<double>(m_);
  for (const auto& t : terms_) {
    for (auto c : t.components) {
      c.weight *= scale;
      if (c.weight > 0) out.push_back(c);
    }
  }
  return Mixture(std::move(out));
}

PosteriorIntensity posterior_closed_form(const Mixture& prior, const ObservationModel& model,
                                         const std::vector<PersistenceDiagram>& observations) {
  model.validate();
  if (observations.empty()) throw DomainError("posterior_closed_form: no observed diagrams");
  const auto points = sorted_observation_points(observations);
  std::vector<ObservationTerm> terms;
  if (model.alpha > 0) {
    terms.reserve(points.size());
    for (const auto& y : points) {
      if (!in_wedge(y) || !y.allFinite()) {
        throw NumericalError("posterior_closed_form: degenerate observation " + describe(y) + " outside the wedge");
      }
      ObservationTerm term;
      term.observation = y;
      term.clutter_density = model.clutter.evaluate(y);
      std::vector<double> w;
      for (const auto& c : prior.components()) {
        const auto product = gaussian_product(y, model.likelihood_variance, c.mean, c.variance);
        w.push_back(c.weight * product.marginal_weight);
        term.components.push_back({0.0, product.mean, product.variance});
        term.wedge_masses.push_back(wedge_gaussian_mass(product.mean, product.variance));
      }
      double detected = 0;
      for (std::size_t j = 0; j < w.size(); ++j) detected += w[j] * term.wedge_masses[j];
      term.denominator = term.clutter_density + model.alpha * detected;
      if (!(term.denominator > 0) || !std::isfinite(term.denominator)) {
        throw NumericalError("posterior_closed_form: degenerate observation " + describe(y) +
                             " (clutter and detection terms vanish)");
      }
      for (std::size_t j = 0; j < w.size(); ++j) term.components[j].weight = w[j] / term.denominator;
      terms.push_back(std::move(term));
    }
  }
  return PosteriorIntensity(prior, model.alpha, observations.size(), std::move(terms));
}

void Grid::validate() const {
  if (nx < 1 || ny < 1) throw DomainError("grid needs at least one point per axis");
  if (!std::isfinite(x0) || !std::isfinite(x1) || !std::isfinite(y0) || !std::isfinite(y1)) {
    throw DomainError("grid bounds must be finite");
  }
  if ((nx > 1 && !(x1 > x0)) || (ny > 1 && !(y1 > y0))) throw DomainError("grid bounds must increase");
}

Eigen::MatrixXd evaluate_function_on_grid(const std::function<double(const Vector2d&)>& f, const Grid& grid) {
  grid.validate();
  Eigen::MatrixXd out(grid.ny, grid.nx);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) out(j, i) = f(Vector2d(grid.x(i), grid.y(j)));
  }
  return out;
}

Eigen::MatrixXd posterior_numeric_oracle(const std::function<double(const Vector2d&)>& prior,
                                         const std::function<double(const Vector2d&)>& alpha,
                                         const ObservationModel& model,
                                         const std::vector<PersistenceDiagram>& observations,
                                         const Grid& grid, const OracleOptions& options) {
  model.validate();
  grid.validate();
  if (observations.empty()) throw DomainError("posterior_numeric_oracle: no observed diagrams");
  const auto points = sorted_observation_points(observations);
  const double lik_var = model.likelihood_variance;
  const double lik_sd = std::sqrt(lik_var);
  auto likelihood = [&](const Vector2d& y, const Vector2d& x) {
    return in_wedge(y) ? gaussian_density(y, x, lik_var) : 0.0;
  };

  // lambda_S(y) + int_W l(y|u) alpha(u) lambda(u) du for every observed y.
  std::vector<double> denominators;
  denominators.reserve(points.size());
  QuadratureOptions quad = options.quadrature;
  quad.initial_cell = std::min(lik_sd, options.prior_length_scale);
  for (const auto& y : points) {
    const double half = options.window_sigmas * lik_sd;
    Box box{Vector2d(std::max(0.0, y(0) - half), std::max(0.0, y(1) - half)),
            Vector2d(std::max(0.0, y(0) + half), std::max(0.0, y(1) + half))};
    if (options.prior_support) {
      box.lo = box.lo.cwiseMin(options.prior_support->lo);
      box.hi = box.hi.cwiseMax(options.prior_support->hi);
    }
    const auto integral = integrate_2d(
        [&](const Vector2d& u) { return likelihood(y, u) * alpha(u) * prior(u); }, box, quad);
    if (!integral.converged) {
      throw NumericalError("posterior_numeric_oracle: quadrature for y = " + describe(y) +
                           " reached error " + format_double(integral.error_estimate) +
                           ", tolerance " + format_double(integral.tolerance));
    }
    const double denom = model.clutter.evaluate(y) + integral.value;
    if (!(denom > 0)) {
      throw NumericalError("posterior_numeric_oracle: degenerate observation " + describe(y));
    }
    denominators.push_back(denom);
  }

  const double inv_m = 1.0 / static_cast<double>(observations.size());
  return evaluate_function_on_grid(
      [&](const Vector2d& x) {
        const double lam = prior(x);
        const double a = alpha(x);
        double data = 0;
        for (std::size_t k = 0; k < points.size(); ++k) {
          data += likelihood(points[k], x) * lam / denominators[k];
        }
        return (1.0 - a) * lam + a * inv_m * data;
      },
      grid);
}

Box mixture_support(const Mixture& m, double sigmas) {
  if (m.empty()) return {Vector2d::Zero(), Vector2d::Zero()};
  Box box{Vector2d::Constant(HUGE_VAL), Vector2d::Constant(-HUGE_VAL)};
  for (const auto& c : m.components()) {
    const double half = sigmas * std::sqrt(c.variance);
    box.lo = box.lo.cwiseMin((c.mean.array() - half).matrix());
    box.hi = box.hi.cwiseMax((c.mean.array() + half).matrix());
  }
  box.lo = box.lo.cwiseMax(0.0);
  box.hi = box.hi.cwiseMax(0.0);
  return box;
}

Eigen::MatrixXd posterior_numeric_oracle(const std::function<double(const Vector2d&)>& prior,
                                         const ObservationModel& model,
                                         const std::vector<PersistenceDiagram>& observations,
                                         const Grid& grid, const OracleOptions& options) {
  const double a = model.alpha;
  return posterior_numeric_oracle(prior, [a](const Vector2d&) { return a; }, model, observations, grid,
                                  options);
}

Eigen::MatrixXd scale_to_unit_max(Eigen::MatrixXd values) {
  const double peak = values.size() ? values.maxCoeff() : 0.0;
  if (peak > 0) values /= peak;
  return values;
}

Eigen::MatrixXd scaled_intensity_grid(const PosteriorIntensity& posterior, const Grid& grid) {
  return scale_to_unit_max(evaluate_on_grid(posterior, grid));
}

double trapezoid_integral(const Eigen::MatrixXd& values, const Grid& grid) {
  if (grid.nx < 2 || grid.ny < 2) return 0;
  const double hx = (grid.x1 - grid.x0) / (grid.nx - 1);
  const double hy = (grid.y1 - grid.y0) / (grid.ny - 1);
  double sum = 0;
  for (int j = 0; j < grid.ny; ++j) {
    const double wy = (j == 0 || j == grid.ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i < grid.nx; ++i) {
      const double wx = (i == 0 || i == grid.nx - 1) ? 0.5 : 1.0;
      sum += wx * wy * values(j, i);
    }
  }
  return sum * hx * hy;
}

std::string format_grid_csv(const Eigen::MatrixXd& values, const Grid& grid) {
  std::string out = "y\\x";
  for (int i = 0; i < grid.nx; ++i) out += "," + format_double(grid.x(i));
  out += '\n';
  for (int j = 0; j < grid.ny; ++j) {
    out += format_double(grid.y(j));
    for (int i = 0; i < grid.nx; ++i) out += "," + format_double(values(j, i));
    out += '\n';
  }
  return out;
}

}  // namespace pdbayes

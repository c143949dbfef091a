#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "pdbayes/error.hpp"
#include "pdbayes/types.hpp"

namespace pdbayes {

// Isotropic planar Gaussian N(x; mean, variance * I).
template <typename Scalar>
Scalar gaussian_density(const Point2<Scalar>& x, const Point2<Scalar>& mean, Scalar variance) {
  const Scalar sq = (x - mean).squaredNorm();
  return std::exp(-sq / (2 * variance)) / (2 * std::numbers::pi_v<Scalar> * variance);
}

template <typename Scalar>
Scalar log_gaussian_density(const Point2<Scalar>& x, const Point2<Scalar>& mean, Scalar variance) {
  const Scalar sq = (x - mean).squaredNorm();
  return -sq / (2 * variance) - std::log(2 * std::numbers::pi_v<Scalar> * variance);
}

// Gaussian restricted to the closed tilted wedge (zero outside, unnormalized).
template <typename Scalar>
Scalar restricted_gaussian_density(const Point2<Scalar>& x, const Point2<Scalar>& mean,
                                   Scalar variance) {
  return in_wedge(x) ? gaussian_density(x, mean, variance) : Scalar(0);
}

// Standard normal CDF via erfc (keeps full relative accuracy in the lower tail).
template <typename Scalar>
Scalar normal_cdf(Scalar z) {
  return Scalar(0.5) * std::erfc(-z / std::numbers::sqrt2_v<Scalar>);
}

// Mass of N(mean, variance * I) on the closed first quadrant. Isotropy makes
// the two coordinates independent, so the integral factorizes.
template <typename Scalar>
Scalar wedge_gaussian_mass(const Point2<Scalar>& mean, Scalar variance) {
  if (!(variance > 0)) throw DomainError("wedge_gaussian_mass: variance must be positive");
  const Scalar sd = std::sqrt(variance);
  return normal_cdf(mean(0) / sd) * normal_cdf(mean(1) / sd);
}

template <typename Scalar>
struct MixtureComponent {
  Scalar weight = 1;
  Point2<Scalar> mean = Point2<Scalar>::Zero();
  Scalar variance = 1;

  void validate() const {
    if (!(weight > 0) || !std::isfinite(weight)) throw DomainError("mixture weight must be positive");
    if (!(variance > 0) || !std::isfinite(variance)) {
      throw DomainError("mixture variance must be positive");
    }
    if (!mean.allFinite()) throw DomainError("mixture mean must be finite");
  }

  Scalar wedge_mass() const { return wedge_gaussian_mass(mean, variance); }
};

// Weighted sum of isotropic Gaussians restricted to the tilted wedge. Used as
// prior intensity, clutter intensity, and the prior part of a posterior.
template <typename Scalar>
class GaussianMixture {
 public:
  using Component = MixtureComponent<Scalar>;

  GaussianMixture() = default;
  explicit GaussianMixture(std::vector<Component> components) : components_(std::move(components)) {
    for (const auto& c : components_) c.validate();
  }

  static GaussianMixture single(Scalar weight, const Point2<Scalar>& mean, Scalar variance) {
    return GaussianMixture({Component{weight, mean, variance}});
  }

  const std::vector<Component>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  bool empty() const { return components_.empty(); }

  void add(const Component& c) {
    c.validate();
    components_.push_back(c);
  }

  Scalar evaluate(const Point2<Scalar>& x) const {
    if (!in_wedge(x)) return 0;
    Scalar sum = 0;
    for (const auto& c : components_) sum += c.weight * gaussian_density(x, c.mean, c.variance);
    return sum;
  }

  // log(evaluate(x)) by log-sum-exp; -inf outside the wedge or when empty.
  Scalar log_evaluate(const Point2<Scalar>& x) const {
    constexpr Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
    if (!in_wedge(x) || components_.empty()) return neg_inf;
    Scalar peak = neg_inf;
    std::vector<Scalar> logs;
    logs.reserve(components_.size());
    for (const auto& c : components_) {
      logs.push_back(std::log(c.weight) + log_gaussian_density(x, c.mean, c.variance));
      peak = std::max(peak, logs.back());
    }
    Scalar sum = 0;
    for (Scalar l : logs) sum += std::exp(l - peak);
    return peak + std::log(sum);
  }

  // Expected cardinality of the Poisson process with this intensity.
  Scalar total_mass() const {
    Scalar sum = 0;
    for (const auto& c : components_) sum += c.weight * c.wedge_mass();
    return sum;
  }

  GaussianMixture concat(const GaussianMixture& other) const {
    GaussianMixture out = *this;
    out.components_.insert(out.components_.end(), other.components_.begin(), other.components_.end());
    return out;
  }

  friend bool operator==(const GaussianMixture& a, const GaussianMixture& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& p = a.components_[i];
      const auto& q = b.components_[i];
      if (p.weight != q.weight || p.variance != q.variance || p.mean != q.mean) return false;
    }
    return true;
  }

 private:
  std::vector<Component> components_;
};

// N(y; x, R) N(x; s, P) = marginal_weight * N(x; mean, variance * I) with
// H = I, R = likelihood_variance * I and P = prior_variance * I.
template <typename Scalar>
struct GaussianProduct {
  Scalar marginal_weight;
  Point2<Scalar> mean;
  Scalar variance;
};

template <typename Scalar>
GaussianProduct<Scalar> gaussian_product(const Point2<Scalar>& observation, Scalar likelihood_variance,
                                         const Point2<Scalar>& prior_mean, Scalar prior_variance) {
  if (!(likelihood_variance > 0) || !(prior_variance > 0)) {
    throw DomainError("gaussian_product: variances must be positive");
  }
  const Scalar total = likelihood_variance + prior_variance;
  return {gaussian_density(observation, prior_mean, total),
          (prior_variance * observation + likelihood_variance * prior_mean) / total,
          likelihood_variance * prior_variance / total};
}

using Component = MixtureComponent<double>;
using Mixture = GaussianMixture<double>;

}  // namespace pdbayes

#include "pdbayes/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pdbayes/error.hpp"
#include "pdbayes/format.hpp"

namespace pdbayes {

Vector2d sample_wedge_gaussian(const Vector2d& center, double variance, Rng& rng,
                               const SamplerOptions& options) {
  const double sd = std::sqrt(variance);
  for (std::uint64_t k = 0; k < options.max_proposals; ++k) {
    const double a = rng.normal();
    const double b = rng.normal();
    const Vector2d x(center(0) + sd * a, center(1) + sd * b);
    if (in_wedge(x)) return x;
  }
  throw SamplingError("wedge rejection sampler exhausted " + std::to_string(options.max_proposals) +
                      " proposals around (" + format_double(center(0)) + ", " +
                      format_double(center(1)) + "); move the mean into the wedge");
}

PersistenceDiagram sample_poisson_pp(const Mixture& intensity, std::uint64_t seed,
                                     const SamplerOptions& options) {
  PersistenceDiagram out;
  out.frame = Frame::Tilted;
  const auto& comps = intensity.components();
  std::vector<double> cumulative;
  double mass = 0;
  for (const auto& c : comps) {
    const double q = c.wedge_mass();
    if (q < options.min_acceptance) {
      throw SamplingError("component at (" + format_double(c.mean(0)) + ", " + format_double(c.mean(1)) +
                          ") has wedge acceptance " + format_double(q) +
                          "; reparameterize so its mean lies nearer the wedge");
    }
    mass += c.weight * q;
    cumulative.push_back(mass);
  }
  if (mass == 0) return out;

  Rng rng(seed);
  const auto count = rng.poisson(mass);
  out.features.reserve(count);
  for (std::uint64_t n = 0; n < count; ++n) {
    const double u = rng.uniform() * mass;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), comps.size() - 1);
    const auto& c = comps[idx];
    out.features.push_back({sample_wedge_gaussian(c.mean, c.variance, rng, options), options.homology_dim});
  }
  return out;
}

PersistenceDiagram sample_observation(const GenerativeModel& model, const PersistenceDiagram& latent,
                                      std::uint64_t seed, const SamplerOptions& options) {
  model.observation.validate();
  if (latent.frame != Frame::Tilted) throw DomainError("sample_observation: latent diagram must be tilted");
  PersistenceDiagram out;
  out.frame = Frame::Tilted;
  Rng rng(derive_seed(seed, 0));
  const double alpha = model.observation.alpha;
  for (const auto& f : latent.features) {
    if (!rng.bernoulli(alpha)) continue;
    out.features.push_back(
        {sample_wedge_gaussian(f.point, model.observation.likelihood_variance, rng, options), f.dim});
  }
  const auto clutter = sample_poisson_pp(model.observation.clutter, derive_seed(seed, 1), options);
  out.features.insert(out.features.end(), clutter.features.begin(), clutter.features.end());
  return out;
}

PersistenceDiagram sample_observed_diagram(const GenerativeModel& model, std::uint64_t seed,
                                           const SamplerOptions& options) {
  const auto latent = sample_poisson_pp(model.latent_prior, derive_seed(seed, 0), options);
  return sample_observation(model, latent, derive_seed(seed, 1), options);
}

PointCloud sample_noisy_circle(int n_points, double noise_variance, std::uint64_t seed) {
  if (n_points < 3) throw DomainError("sample_noisy_circle: need at least 3 points");
  if (!(noise_variance >= 0)) throw DomainError("sample_noisy_circle: noise variance must be >= 0");
  Rng rng(seed);
  const double sd = std::sqrt(noise_variance);
  PointCloud cloud(n_points, 2);
  for (int i = 0; i < n_points; ++i) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    cloud(i, 0) = std::cos(theta);
    cloud(i, 1) = std::sin(theta);
    if (sd > 0) {
      cloud(i, 0) += sd * rng.normal();
      cloud(i, 1) += sd * rng.normal();
    }
  }
  return cloud;
}

void LatticeSpec::validate() const {
  if (cells_per_axis < 1) throw DomainError("lattice: cells_per_axis must be >= 1");
  if (!(lattice_constant > 0)) throw DomainError("lattice: lattice_constant must be positive");
  if (!(retention_probability > 0 && retention_probability <= 1)) {
    throw DomainError("lattice: retention probability must lie in (0, 1]");
  }
  if (!(noise_stddev >= 0)) throw DomainError("lattice: noise stddev must be >= 0");
}

PointCloud lattice_sites(LatticeType type, int cells_per_axis) {
  if (cells_per_axis < 1) throw DomainError("lattice: cells_per_axis must be >= 1");
  // Work on the half-step integer grid: corners have all coordinates even,
  // body centres all odd, face centres exactly two odd.
  const int top = 2 * cells_per_axis;
  std::vector<Eigen::Vector3d> sites;
  for (int a = 0; a <= top; ++a) {
    for (int b = 0; b <= top; ++b) {
      for (int c = 0; c <= top; ++c) {
        const int odd = (a & 1) + (b & 1) + (c & 1);
        const bool keep = odd == 0 || (type == LatticeType::Bcc && odd == 3) ||
                          (type == LatticeType::Fcc && odd == 2);
        if (keep) sites.emplace_back(0.5 * a, 0.5 * b, 0.5 * c);
      }
    }
  }
  PointCloud cloud(static_cast<Eigen::Index>(sites.size()), 3);
  for (std::size_t i = 0; i < sites.size(); ++i) cloud.row(static_cast<Eigen::Index>(i)) = sites[i].transpose();
  return cloud;
}

PointCloud sample_lattice(const LatticeSpec& spec, std::uint64_t seed) {
  spec.validate();
  const PointCloud sites = lattice_sites(spec.type, spec.cells_per_axis);
  Rng rng(seed);
  std::vector<Eigen::Vector3d> kept;
  for (Eigen::Index i = 0; i < sites.rows(); ++i) {
    if (!rng.bernoulli(spec.retention_probability)) continue;
    Eigen::Vector3d p = spec.lattice_constant * sites.row(i).transpose();
    if (spec.noise_stddev > 0) {
      for (int k = 0; k < 3; ++k) p(k) += spec.noise_stddev * rng.normal();
    }
    kept.push_back(p);
  }
  if (kept.empty()) throw DomainError("sample_lattice: every site was removed");
  PointCloud cloud(static_cast<Eigen::Index>(kept.size()), 3);
  for (std::size_t i = 0; i < kept.size(); ++i) cloud.row(static_cast<Eigen::Index>(i)) = kept[i].transpose();
  return cloud;
}

LatticeType parse_lattice_type(const std::string& name) {
  if (name == "bcc" || name == "BCC") return LatticeType::Bcc;
  if (name == "fcc" || name == "FCC") return LatticeType::Fcc;
  throw DomainError("unknown lattice type '" + name + "' (expected bcc or fcc)");
}

std::string to_string(LatticeType type) { return type == LatticeType::Bcc ? "bcc" : "fcc"; }

}  // namespace pdbayes

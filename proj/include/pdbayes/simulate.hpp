#pragma once

#include <cstdint>

#include "pdbayes/diagram.hpp"
#include "pdbayes/intensity.hpp"
#include "pdbayes/posterior.hpp"
#include "pdbayes/random.hpp"
#include "pdbayes/types.hpp"

namespace pdbayes {

// Latent Poisson process plus the observation channel (thinning by alpha,
// Gaussian marks, additive clutter).
struct GenerativeModel {
  Mixture latent_prior;
  ObservationModel observation;
};

struct SamplerOptions {
  std::uint64_t max_proposals = 10'000'000;
  // Components whose wedge mass falls below this are rejected up front.
  double min_acceptance = 1e-6;
  int homology_dim = 1;
};

// Tilted diagram from the Poisson process with the given intensity.
PersistenceDiagram sample_poisson_pp(const Mixture& intensity, std::uint64_t seed,
                                     const SamplerOptions& options = {});

// Draw from N(center, variance I) conditioned on the closed wedge.
Vector2d sample_wedge_gaussian(const Vector2d& center, double variance, Rng& rng,
                               const SamplerOptions& options = {});

PersistenceDiagram sample_observation(const GenerativeModel& model, const PersistenceDiagram& latent,
                                      std::uint64_t seed, const SamplerOptions& options = {});

// Latent draw followed by an observation draw (seeds derived from `seed`).
PersistenceDiagram sample_observed_diagram(const GenerativeModel& model, std::uint64_t seed,
                                           const SamplerOptions& options = {});

// n points uniform on the unit circle plus N(0, noise_variance I) noise.
PointCloud sample_noisy_circle(int n_points, double noise_variance, std::uint64_t seed);

enum class LatticeType { Bcc, Fcc };

struct LatticeSpec {
  LatticeType type = LatticeType::Bcc;
  int cells_per_axis = 2;
  double lattice_constant = 2.0;
  double retention_probability = 0.35;
  double noise_stddev = 0.1;  // 0.05 * lattice_constant

  void validate() const;
};

// Deduplicated lattice sites of the supercell in units of the lattice constant.
PointCloud lattice_sites(LatticeType type, int cells_per_axis);

// Sites scaled by the lattice constant, thinned, and jittered. Throws
// DomainError if no site survives.
PointCloud sample_lattice(const LatticeSpec& spec, std::uint64_t seed);

LatticeType parse_lattice_type(const std::string& name);
std::string to_string(LatticeType type);

}  // namespace pdbayes

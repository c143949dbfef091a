#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdbayes/classify.hpp"
#include "pdbayes/intensity.hpp"
#include "pdbayes/posterior.hpp"
#include "pdbayes/rips.hpp"
#include "pdbayes/simulate.hpp"

namespace pdbayes {

// Named single-component and bimodal priors for the circle study.
std::vector<std::string> prior_preset_names();
Mixture prior_preset(const std::string& name);

// Clutter c * N*((0.5, 0), sigma_ys I) with c = 1.
Mixture circle_clutter(double sigma_ys);

struct PosteriorStudy {
  std::string prior_name;  // preset name, or "custom"
  Mixture prior;
  ObservationModel observation;
  // Exactly one data source: a sampled circle or a list of diagram files.
  int circle_points = 50;
  double circle_noise_variance = 0.001;
  std::vector<std::string> diagram_files;
  int homology_dim = 1;
  Grid grid;
};

struct LatticeStudy {
  int cells_per_axis = 2;
  double lattice_constant = 2.0;
  double retention_probability = 0.35;
  double noise_stddev = 0.1;
  int diagrams_per_class = 200;
  std::vector<PriorSpec> priors;
  CrossValidationConfig cv;  // cv.prior is overridden per entry of `priors`
};

struct ExperimentConfig {
  enum class Kind { Posterior, Classification };
  std::string name;
  Kind kind = Kind::Posterior;
  std::uint64_t seed = 7;
  PosteriorStudy posterior;
  LatticeStudy lattice;
};

std::vector<std::string> experiment_preset_names();
// Throws UsageError listing the presets when `name` is unknown.
ExperimentConfig experiment_preset(const std::string& name);

// Full expansion of a config; `parse_experiment_config` accepts it back.
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

ObservationModel parse_observation_model(const nlohmann::json& doc);
nlohmann::json to_json(const ObservationModel& model);

// Classifies the document (mixture, observation model, or experiment
// config), validates it, and returns the detected kind. Throws
// ValidationError on semantic problems.
std::string validate_config(const nlohmann::json& doc);

// H1 diagrams of sampled lattices, one vector per class (BCC first).
std::vector<PersistenceDiagram> lattice_diagrams(LatticeType type, const LatticeStudy& study, std::uint64_t seed);

// Runs the experiment, writing every artifact (and manifest.json) under
// `out_dir`. Returns the manifest.
nlohmann::json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace pdbayes

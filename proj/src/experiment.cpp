#include "pdbayes/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pdbayes/error.hpp"
#include "pdbayes/format.hpp"
#include "pdbayes/intensity_io.hpp"

namespace pdbayes {

using nlohmann::json;

namespace {

struct CaseSetting {
  double noise_variance;
  double sigma_yo;
  double sigma_ys;
};

struct CaseDef {
  int number;
  double alpha;
  std::vector<CaseSetting> settings;
};

// Circle noise and (M3') variances per case; the first setting of each case
// is the unsuffixed preset, later ones get "-v2", "-v3".
const std::vector<CaseDef>& case_table() {
  static const std::vector<CaseDef> table{
      {1, 1.0, {{0.001, 0.01, 0.1}, {0.001, 0.1, 0.1}}},
      {2, 1.0, {{0.01, 0.1, 0.1}, {0.01, 0.1, 1.0}}},
      {3, 1.0, {{0.1, 0.01, 0.1}, {0.1, 0.1, 0.1}}},
      {4, 0.5, {{0.001, 0.1, 0.1}, {0.01, 0.1, 1.0}, {0.1, 0.01, 0.1}}},
  };
  return table;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

// Typed field access with the JSON path in error messages.
class Reader {
 public:
  Reader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ValidationError(path_ + " must be an object");
  }

  bool has(const char* key) const { return doc_.contains(key); }
  const json& at(const char* key) const {
    if (!doc_.contains(key)) throw ValidationError(path_ + "." + key + " is required");
    return doc_.at(key);
  }

  double number(const char* key) const {
    const auto& v = at(key);
    if (!v.is_number()) throw ValidationError(path_ + "." + key + " must be a number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  long integer(const char* key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ValidationError(path_ + "." + key + " must be an integer");
    return v.get<long>();
  }
  long integer(const char* key, long fallback) const { return has(key) ? integer(key) : fallback; }

  std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_number_unsigned()) throw ValidationError(path_ + "." + key + " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const char* key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ValidationError(path_ + "." + key + " must be a string");
    return v.get<std::string>();
  }
  std::string string(const char* key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

 private:
  const json& doc_;
  std::string path_;
};

Mixture mixture_at(const json& doc, const std::string& path) {
  try {
    return mixture_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Grid parse_grid(const json& doc, const std::string& path) {
  Reader r(doc, path);
  Grid g;
  g.x0 = r.number("x0", g.x0);
  g.x1 = r.number("x1", g.x1);
  g.y0 = r.number("y0", g.y0);
  g.y1 = r.number("y1", g.y1);
  g.nx = static_cast<int>(r.integer("nx", g.nx));
  g.ny = static_cast<int>(r.integer("ny", g.ny));
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return g;
}

json grid_to_json(const Grid& g) {
  return {{"x0", g.x0}, {"x1", g.x1}, {"y0", g.y0}, {"y1", g.y1}, {"nx", g.nx}, {"ny", g.ny}};
}

std::pair<int, int> argmax(const Eigen::MatrixXd& values) {
  int best_row = 0, best_col = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < values.rows(); ++j) {
    for (int i = 0; i < values.cols(); ++i) {
      if (values(j, i) > best) {
        best = values(j, i);
        best_row = j;
        best_col = i;
      }
    }
  }
  return {best_row, best_col};
}

json run_posterior_study(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const auto& study = config.posterior;
  json artifacts = json::array();
  std::vector<PersistenceDiagram> observed;

  if (study.diagram_files.empty()) {
    const auto cloud = sample_noisy_circle(study.circle_points, study.circle_noise_variance,
                                           derive_seed(config.seed, 0));
    write_point_cloud(cloud, out_dir / "cloud.csv");
    artifacts.push_back("cloud.csv");
    FiltrationParams params;
    params.max_homology_dim = std::max(1, study.homology_dim);
    const auto full = rips_persistence(cloud, params);
    write_diagram(full, out_dir / "diagram_full.csv");
    artifacts.push_back("diagram_full.csv");
    observed.push_back(full.restrict_to(study.homology_dim));
  } else {
    for (const auto& file : study.diagram_files) observed.push_back(load_tilted(file, study.homology_dim));
  }
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const auto name = "observed_" + std::to_string(i + 1) + ".csv";
    write_diagram(observed[i], out_dir / name);
    artifacts.push_back(name);
  }

  const auto posterior = posterior_closed_form(study.prior, study.observation, observed);
  const auto raw = evaluate_on_grid(posterior, study.grid);
  const auto scaled = scale_to_unit_max(raw);
  const auto prior_scaled = scale_to_unit_max(evaluate_on_grid(study.prior, study.grid));
  write_file_atomic(out_dir / "posterior_scaled.csv", format_grid_csv(scaled, study.grid));
  write_file_atomic(out_dir / "prior_scaled.csv", format_grid_csv(prior_scaled, study.grid));
  artifacts.push_back("posterior_scaled.csv");
  artifacts.push_back("prior_scaled.csv");

  const auto [row, col] = argmax(raw);
  const Vector2d peak(study.grid.x(col), study.grid.y(row));
  json manifest;
  manifest["argmax"] = {peak(0), peak(1)};
  manifest["argmax_intensity"] = raw(row, col);

  std::optional<Vector2d> prominent;
  for (const auto& d : observed) {
    for (const auto& f : d.features) {
      if (!prominent || f.point(1) > (*prominent)(1)) prominent = f.point;
    }
  }
  if (prominent) {
    manifest["most_persistent_feature"] = {(*prominent)(0), (*prominent)(1)};
    manifest["argmax_distance_to_most_persistent"] = (peak - *prominent).norm();
  }
  json counts = json::array();
  for (const auto& d : observed) counts.push_back(d.size());
  manifest["observed_feature_counts"] = counts;
  manifest["masses"] = {{"prior_mass", posterior.prior().total_mass()},
                        {"retention_scale", posterior.retention_scale()},
                        {"retention_mass", posterior.retention_mass()},
                        {"data_mass", posterior.data_mass()},
                        {"total_mass", posterior.total_mass()}};
  manifest["artifacts"] = artifacts;
  return manifest;
}

json run_lattice_study(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const auto& study = config.lattice;
  const auto bcc = lattice_diagrams(LatticeType::Bcc, study, derive_seed(config.seed, 1));
  const auto fcc = lattice_diagrams(LatticeType::Fcc, study, derive_seed(config.seed, 2));
  json artifacts = json::array();
  for (const auto& [name, diagrams] : {std::pair{"bcc", &bcc}, std::pair{"fcc", &fcc}}) {
    std::filesystem::create_directories(out_dir / name);
    for (const auto& d : *diagrams) {
      write_diagram(d, out_dir / name / *d.label);
    }
    artifacts.push_back(std::string(name) + "/");
  }

  json summaries = json::array();
  for (std::size_t p = 0; p < study.priors.size(); ++p) {
    auto cv = study.cv;
    cv.prior = study.priors[p];
    cv.seed = derive_seed(config.seed, 3);
    cv.class1_label = "bcc";
    cv.class2_label = "fcc";
    const auto report = cross_validate(bcc, fcc, cv);
    const auto name = "report_prior" + std::to_string(p + 1) + ".json";
    write_file_atomic(out_dir / name, to_json(report).dump(2) + "\n");
    artifacts.push_back(name);
    summaries.push_back({{"prior_mode", cv.prior.describe()},
                         {"report", name},
                         {"mean_auc", report.mean_auc},
                         {"bootstrap_summary",
                          {{"p5", report.bootstrap.p5},
                           {"mean", report.bootstrap.mean},
                           {"p95", report.bootstrap.p95},
                           {"resamples", report.bootstrap.resamples}}}});
  }
  json manifest;
  manifest["auc_summary"] = summaries;
  manifest["artifacts"] = artifacts;
  return manifest;
}

}  // namespace

std::vector<std::string> prior_preset_names() {
  return {"informative", "weakly-informative", "unimodal-uninformative", "bimodal-uninformative"};
}

Mixture prior_preset(const std::string& name) {
  if (name == "informative") return Mixture::single(1.0, Vector2d(0.5, 1.2), 0.01);
  if (name == "weakly-informative") return Mixture::single(1.0, Vector2d(0.5, 1.2), 0.2);
  if (name == "unimodal-uninformative") return Mixture::single(1.0, Vector2d(1.0, 1.0), 1.0);
  if (name == "bimodal-uninformative") {
    return Mixture({{1.0, Vector2d(0.5, 0.5), 0.2}, {2.0, Vector2d(1.5, 1.5), 0.2}});
  }
  throw UsageError("unknown prior preset '" + name + "'; available: " + join(prior_preset_names()));
}

Mixture circle_clutter(double sigma_ys) { return Mixture::single(1.0, Vector2d(0.5, 0.0), sigma_ys); }

std::vector<std::string> experiment_preset_names() {
  std::vector<std::string> names;
  for (const auto& c : case_table()) {
    for (std::size_t v = 0; v < c.settings.size(); ++v) {
      for (const auto& prior : prior_preset_names()) {
        auto name = "case" + std::to_string(c.number) + "-" + prior;
        if (v > 0) name += "-v" + std::to_string(v + 1);
        names.push_back(name);
      }
    }
  }
  names.push_back("aptlike-cv");
  return names;
}

ExperimentConfig experiment_preset(const std::string& name) {
  ExperimentConfig config;
  config.name = name;
  if (name == "aptlike-cv") {
    config.kind = ExperimentConfig::Kind::Classification;
    auto& study = config.lattice;
    study.noise_stddev = 0.05 * study.lattice_constant;
    study.priors = {PriorSpec::parse("kmeans:k=3,var=2,weight=1,sample=50"),
                    PriorSpec::parse("flat:mean=1,1,var=20,weight=1")};
    return config;
  }
  for (const auto& c : case_table()) {
    for (std::size_t v = 0; v < c.settings.size(); ++v) {
      for (const auto& prior : prior_preset_names()) {
        auto candidate = "case" + std::to_string(c.number) + "-" + prior;
        if (v > 0) candidate += "-v" + std::to_string(v + 1);
        if (candidate != name) continue;
        const auto& s = c.settings[v];
        auto& study = config.posterior;
        study.prior_name = prior;
        study.prior = prior_preset(prior);
        study.observation = {c.alpha, s.sigma_yo, circle_clutter(s.sigma_ys)};
        study.circle_points = 50;
        study.circle_noise_variance = s.noise_variance;
        return config;
      }
    }
  }
  throw UsageError("unknown preset '" + name + "'; available: " + join(experiment_preset_names()));
}

json to_json(const ObservationModel& model) {
  return {{"alpha", model.alpha}, {"sigma_yo", model.likelihood_variance}, {"clutter", mixture_to_json(model.clutter)}};
}

ObservationModel parse_observation_model(const json& doc) {
  Reader r(doc, "observation");
  ObservationModel model;
  model.alpha = r.number("alpha", 1.0);
  if (r.has("sigma_yo")) {
    model.likelihood_variance = r.number("sigma_yo");
  } else {
    model.likelihood_variance = r.number("likelihood_variance");
  }
  if (r.has("clutter")) {
    model.clutter = mixture_at(r.at("clutter"), r.path("clutter"));
  } else if (r.has("sigma_ys")) {
    model.clutter = circle_clutter(r.number("sigma_ys"));
  }
  try {
    model.validate();
  } catch (const DomainError& e) {
    throw ValidationError(std::string("observation: ") + e.what());
  }
  return model;
}

json to_json(const ExperimentConfig& config) {
  json doc;
  doc["name"] = config.name;
  doc["seed"] = config.seed;
  if (config.kind == ExperimentConfig::Kind::Posterior) {
    const auto& s = config.posterior;
    doc["kind"] = "posterior";
    doc["prior_name"] = s.prior_name;
    doc["prior"] = mixture_to_json(s.prior);
    doc["observation"] = to_json(s.observation);
    if (s.diagram_files.empty()) {
      doc["data"] = {{"source", "circle"}, {"n_points", s.circle_points}, {"noise_variance", s.circle_noise_variance}};
    } else {
      doc["data"] = {{"source", "diagrams"}, {"files", s.diagram_files}};
    }
    doc["homology_dim"] = s.homology_dim;
    doc["grid"] = grid_to_json(s.grid);
  } else {
    const auto& s = config.lattice;
    doc["kind"] = "classification";
    doc["lattice"] = {{"cells", s.cells_per_axis},
                      {"lattice_constant", s.lattice_constant},
                      {"retention", s.retention_probability},
                      {"noise", s.noise_stddev}};
    doc["diagrams_per_class"] = s.diagrams_per_class;
    json priors = json::array();
    for (const auto& p : s.priors) priors.push_back(p.describe());
    doc["priors"] = priors;
    doc["folds"] = s.cv.folds;
    doc["alpha"] = s.cv.alpha;
    doc["sigma_yo"] = s.cv.likelihood_variance;
    doc["clutter"] = mixture_to_json(s.cv.clutter);
    doc["density_mode"] = to_string(s.cv.mode);
    doc["threshold"] = s.cv.threshold;
    doc["bootstrap_resamples"] = s.cv.bootstrap_resamples;
    doc["kmeans_restarts"] = s.cv.kmeans_restarts;
  }
  return doc;
}

ExperimentConfig parse_experiment_config(const json& doc) {
  Reader r(doc, "experiment");
  ExperimentConfig config;
  // A config may start from a preset and override fields.
  if (r.has("preset")) config = experiment_preset(r.string("preset"));
  config.name = r.string("name", config.name.empty() ? "custom" : config.name);
  config.seed = r.unsigned_integer("seed", config.seed);
  const auto kind = r.string("kind", config.kind == ExperimentConfig::Kind::Posterior ? "posterior" : "classification");
  try {
    if (kind == "posterior") {
      config.kind = ExperimentConfig::Kind::Posterior;
      auto& s = config.posterior;
      if (r.has("prior")) {
        const auto& p = r.at("prior");
        if (p.is_string()) {
          s.prior_name = p.get<std::string>();
          s.prior = prior_preset(s.prior_name);
        } else {
          s.prior_name = r.string("prior_name", "custom");
          s.prior = mixture_at(p, r.path("prior"));
        }
      }
      if (s.prior.empty()) throw ValidationError("experiment.prior is required");
      if (r.has("observation")) s.observation = parse_observation_model(r.at("observation"));
      if (r.has("data")) {
        Reader d(r.at("data"), r.path("data"));
        const auto source = d.string("source");
        if (source == "circle") {
          s.diagram_files.clear();
          s.circle_points = static_cast<int>(d.integer("n_points", s.circle_points));
          s.circle_noise_variance = d.number("noise_variance", s.circle_noise_variance);
          if (s.circle_points < 3 || !(s.circle_noise_variance >= 0)) {
            throw ValidationError("experiment.data: need n_points >= 3 and noise_variance >= 0");
          }
        } else if (source == "diagrams") {
          const auto& files = d.at("files");
          if (!files.is_array() || files.empty()) {
            throw ValidationError("experiment.data.files must be a non-empty array");
          }
          s.diagram_files.clear();
          for (const auto& f : files) {
            if (!f.is_string()) throw ValidationError("experiment.data.files entries must be strings");
            s.diagram_files.push_back(f.get<std::string>());
          }
        } else {
          throw ValidationError("experiment.data.source must be 'circle' or 'diagrams'");
        }
      }
      s.homology_dim = static_cast<int>(r.integer("homology_dim", s.homology_dim));
      if (s.homology_dim < 0 || s.homology_dim > 2) throw ValidationError("experiment.homology_dim must be 0..2");
      if (r.has("grid")) s.grid = parse_grid(r.at("grid"), r.path("grid"));
    } else if (kind == "classification") {
      config.kind = ExperimentConfig::Kind::Classification;
      auto& s = config.lattice;
      if (r.has("lattice")) {
        Reader l(r.at("lattice"), r.path("lattice"));
        s.cells_per_axis = static_cast<int>(l.integer("cells", s.cells_per_axis));
        s.lattice_constant = l.number("lattice_constant", s.lattice_constant);
        s.retention_probability = l.number("retention", s.retention_probability);
        s.noise_stddev = l.number("noise", s.noise_stddev);
        LatticeSpec{LatticeType::Bcc, s.cells_per_axis, s.lattice_constant, s.retention_probability,
                    s.noise_stddev}
            .validate();
      }
      s.diagrams_per_class = static_cast<int>(r.integer("diagrams_per_class", s.diagrams_per_class));
      if (r.has("priors")) {
        const auto& priors = r.at("priors");
        if (!priors.is_array() || priors.empty()) throw ValidationError("experiment.priors must be a non-empty array");
        s.priors.clear();
        for (const auto& p : priors) {
          if (!p.is_string()) throw ValidationError("experiment.priors entries must be strings");
          s.priors.push_back(PriorSpec::parse(p.get<std::string>()));
        }
      }
      if (s.priors.empty()) throw ValidationError("experiment.priors is required");
      s.cv.folds = static_cast<int>(r.integer("folds", s.cv.folds));
      s.cv.alpha = r.number("alpha", s.cv.alpha);
      s.cv.likelihood_variance = r.number("sigma_yo", s.cv.likelihood_variance);
      if (r.has("clutter")) s.cv.clutter = mixture_at(r.at("clutter"), r.path("clutter"));
      s.cv.mode = parse_density_mode(r.string("density_mode", to_string(s.cv.mode)));
      s.cv.threshold = r.number("threshold", s.cv.threshold);
      s.cv.bootstrap_resamples = static_cast<int>(r.integer("bootstrap_resamples", s.cv.bootstrap_resamples));
      s.cv.kmeans_restarts = static_cast<int>(r.integer("kmeans_restarts", s.cv.kmeans_restarts));
      if (s.diagrams_per_class < s.cv.folds || s.cv.folds < 2 || s.cv.bootstrap_resamples < 1 ||
          !(s.cv.threshold > 0)) {
        throw ValidationError("experiment: need folds >= 2, diagrams_per_class >= folds, resamples >= 1, threshold > 0");
      }
      ObservationModel{s.cv.alpha, s.cv.likelihood_variance, s.cv.clutter}.validate();
    } else {
      throw ValidationError("experiment.kind must be 'posterior' or 'classification'");
    }
  } catch (const DomainError& e) {
    throw ValidationError(std::string("experiment: ") + e.what());
  }
  return config;
}

std::string validate_config(const json& doc) {
  if (doc.is_array()) {
    mixture_from_json(doc);
    return "mixture";
  }
  if (!doc.is_object()) throw ValidationError("config must be a JSON object or a mixture array");
  if (doc.contains("kind") || doc.contains("preset") || doc.contains("data") || doc.contains("lattice")) {
    parse_experiment_config(doc);
    return "experiment";
  }
  if (doc.contains("sigma_yo") || doc.contains("likelihood_variance")) {
    parse_observation_model(doc);
    return "observation-model";
  }
  throw ValidationError("unrecognised config: expected a mixture array, an observation model, or an experiment");
}

std::vector<PersistenceDiagram> lattice_diagrams(LatticeType type, const LatticeStudy& study, std::uint64_t seed) {
  LatticeSpec spec{type, study.cells_per_axis, study.lattice_constant, study.retention_probability,
                   study.noise_stddev};
  FiltrationParams params;
  params.max_homology_dim = 1;
  std::vector<PersistenceDiagram> out;
  out.reserve(static_cast<std::size_t>(study.diagrams_per_class));
  for (int i = 0; i < study.diagrams_per_class; ++i) {
    const auto cloud = sample_lattice(spec, derive_seed(seed, static_cast<std::uint64_t>(i)));
    auto d = rips_persistence(cloud, params).restrict_to(1);
    char name[32];
    std::snprintf(name, sizeof name, "%s_%04d.csv", to_string(type).c_str(), i);
    d.label = name;
    out.push_back(std::move(d));
  }
  return out;
}

json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  json manifest = config.kind == ExperimentConfig::Kind::Posterior ? run_posterior_study(config, out_dir)
                                                                   : run_lattice_study(config, out_dir);
  manifest["config"] = to_json(config);
  manifest["version"] = PDBAYES_VERSION;
  write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace pdbayes

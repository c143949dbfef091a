#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdbayes/classify.hpp"
#include "pdbayes/diagram.hpp"
#include "pdbayes/error.hpp"
#include "pdbayes/experiment.hpp"
#include "pdbayes/format.hpp"
#include "pdbayes/intensity_io.hpp"
#include "pdbayes/posterior.hpp"
#include "pdbayes/rips.hpp"
#include "pdbayes/simulate.hpp"

namespace fs = std::filesystem;
using namespace pdbayes;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumerical = 3;

Grid parse_grid_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::string field;
  for (char ch : text + ",") {
    if (ch == ',') {
      parts.push_back(field);
      field.clear();
    } else {
      field += ch;
    }
  }
  if (parts.size() != 6) throw UsageError("--grid expects x0,x1,y0,y1,nx,ny");
  Grid g;
  try {
    g.x0 = parse_double(parts[0]);
    g.x1 = parse_double(parts[1]);
    g.y0 = parse_double(parts[2]);
    g.y1 = parse_double(parts[3]);
    g.nx = static_cast<int>(parse_integer(parts[4]));
    g.ny = static_cast<int>(parse_integer(parts[5]));
    g.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
  return g;
}

std::vector<PersistenceDiagram> load_directory(const fs::path& dir, int dim) {
  if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".csv" || ext == ".json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("no diagram files in " + dir.string());
  std::vector<PersistenceDiagram> out;
  for (const auto& f : files) {
    auto d = load_tilted(f, dim);
    d.label = f.filename().string();
    out.push_back(std::move(d));
  }
  return out;
}

struct ComputePdArgs {
  std::string input, output;
  int max_dim = 1;
  double max_radius = std::numeric_limits<double>::infinity();
  bool header = false;
};

void run_compute_pd(const ComputePdArgs& a) {
  FiltrationParams params;
  params.max_homology_dim = a.max_dim;
  params.max_radius = a.max_radius;
  const auto diagram = rips_persistence(read_point_cloud(a.input, a.header), params);
  write_diagram(diagram, a.output);
  if (diagram.dropped_essential > 0) {
    std::cerr << "note: " << diagram.dropped_essential << " essential class(es) omitted\n";
  }
}

struct PosteriorArgs {
  std::string prior, model, out, grid = "0,3,0,3,200,200";
  std::vector<std::string> obs;
  int dim = 1;
  bool scaled = false;
};

void run_posterior(const PosteriorArgs& a) {
  const auto grid = parse_grid_spec(a.grid);
  const auto prior = read_mixture(a.prior);
  const auto model = parse_observation_model(read_json_file(a.model));
  std::vector<PersistenceDiagram> observed;
  for (const auto& f : a.obs) observed.push_back(load_tilted(f, a.dim));
  const auto posterior = posterior_closed_form(prior, model, observed);
  auto values = evaluate_on_grid(posterior, grid);
  if (a.scaled) values = scale_to_unit_max(std::move(values));
  write_file_atomic(a.out, format_grid_csv(values, grid));
}

struct SimulateArgs {
  std::uint64_t seed = 7;
  std::string out;
  int n = 50;
  double noise_var = 0.01;
  std::string type = "bcc";
  int cells = 2;
  double constant = 2.0;
  double retention = 0.35;
  double noise = 0.1;
  std::string prior, model;
  int dim = 1;
};

struct ClassifyArgs {
  std::string class1_dir, class2_dir, report, clutter;
  std::string prior_mode = "kmeans:k=3,var=2";
  std::string mode = "paper-literal";
  int folds = 10;
  int dim = 1;
  double alpha = 1.0;
  double sigma_yo = 0.1;
  double threshold = 1.0;
  int bootstrap = 2000;
  std::uint64_t seed = 7;
};

void run_classify(const ClassifyArgs& a) {
  CrossValidationConfig cv;
  cv.folds = a.folds;
  cv.prior = PriorSpec::parse(a.prior_mode);
  cv.alpha = a.alpha;
  cv.likelihood_variance = a.sigma_yo;
  if (!a.clutter.empty()) cv.clutter = read_mixture(a.clutter);
  cv.mode = parse_density_mode(a.mode);
  cv.threshold = a.threshold;
  cv.seed = a.seed;
  cv.bootstrap_resamples = a.bootstrap;
  cv.class1_label = fs::path(a.class1_dir).filename().string();
  cv.class2_label = fs::path(a.class2_dir).filename().string();
  if (cv.class1_label.empty()) cv.class1_label = "class1";
  if (cv.class2_label.empty()) cv.class2_label = "class2";
  const auto report = cross_validate(load_directory(a.class1_dir, a.dim), load_directory(a.class2_dir, a.dim), cv);
  write_file_atomic(a.report, to_json(report).dump(2) + "\n");
  std::cout << "mean AUC " << format_double(report.mean_auc) << ", bootstrap p5 "
            << format_double(report.bootstrap.p5) << ", p95 " << format_double(report.bootstrap.p95) << "\n";
}

struct ExperimentArgs {
  std::string preset, config, out_dir;
  std::uint64_t seed = 0;
  bool list = false;
  bool validate_only = false;
};

void run_experiment_command(const ExperimentArgs& a, const CLI::App& sub) {
  if (a.list) {
    for (const auto& name : experiment_preset_names()) std::cout << name << "\n";
    return;
  }
  if (a.preset.empty() == a.config.empty()) throw UsageError("experiment: give exactly one of --preset or --config");
  auto config = a.preset.empty() ? parse_experiment_config(read_json_file(a.config)) : experiment_preset(a.preset);
  if (sub.count("--seed") > 0) config.seed = a.seed;
  if (a.validate_only) {
    std::cout << "ok: " << config.name << "\n";
    return;
  }
  if (a.out_dir.empty()) throw UsageError("experiment: --out-dir is required");
  const auto manifest = run_experiment(config, a.out_dir);
  std::cout << "wrote " << (fs::path(a.out_dir) / "manifest.json").string() << "\n";
}

int config_validate(const std::vector<std::string>& files, const std::vector<std::string>& presets, bool all) {
  int failures = 0;
  for (const auto& f : files) {
    try {
      const auto kind = validate_config(read_json_file(f));
      std::cout << f << ": ok (" << kind << ")\n";
    } catch (const Error& e) {
      std::cerr << e.what() << "\n";
      ++failures;
    }
  }
  auto names = presets;
  if (all) names = experiment_preset_names();
  for (const auto& name : names) {
    const auto expanded = to_json(experiment_preset(name));
    validate_config(expanded);
    std::cout << name << ": ok (preset)\n";
  }
  return failures == 0 ? 0 : kData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference and classification for persistence diagrams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PDBAYES_VERSION);

  ComputePdArgs cpd;
  auto* compute = app.add_subcommand("compute-pd", "Vietoris-Rips persistence diagram of a point cloud");
  compute->add_option("--input", cpd.input, "point cloud CSV")->required();
  compute->add_option("--output", cpd.output, "diagram file (.csv or .json)")->required();
  compute->add_option("--max-dim", cpd.max_dim, "largest homology dimension")->check(CLI::Range(0, 2));
  compute->add_option("--max-radius", cpd.max_radius, "filtration cutoff");
  compute->add_flag("--header", cpd.header, "skip one header line");

  PosteriorArgs post;
  auto* posterior = app.add_subcommand("posterior", "posterior intensity on a grid");
  posterior->add_option("--prior", post.prior, "prior mixture JSON")->required();
  posterior->add_option("--model", post.model, "observation model JSON")->required();
  posterior->add_option("--obs", post.obs, "observed diagram files")->required();
  posterior->add_option("--grid", post.grid, "x0,x1,y0,y1,nx,ny");
  posterior->add_option("--out", post.out, "grid CSV")->required();
  posterior->add_option("--dim", post.dim, "homology dimension")->check(CLI::Range(0, 2));
  posterior->add_flag("--scaled", post.scaled, "divide by the grid maximum");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "synthetic point clouds and diagrams");
  simulate->require_subcommand(1);
  auto* circle = simulate->add_subcommand("circle", "noisy unit circle");
  circle->add_option("--n", sim.n, "number of points")->check(CLI::Range(3, 1000000));
  circle->add_option("--noise-var", sim.noise_var, "noise variance");
  auto* lattice = simulate->add_subcommand("lattice", "thinned, jittered BCC/FCC lattice");
  lattice->add_option("--type", sim.type, "bcc or fcc");
  lattice->add_option("--cells", sim.cells, "unit cells per axis");
  lattice->add_option("--lattice-constant", sim.constant, "lattice constant");
  lattice->add_option("--retention", sim.retention, "site retention probability");
  lattice->add_option("--noise", sim.noise, "jitter standard deviation");
  auto* diagram = simulate->add_subcommand("diagram", "observed diagram from the generative model");
  diagram->add_option("--prior", sim.prior, "latent intensity mixture JSON")->required();
  diagram->add_option("--model", sim.model, "observation model JSON")->required();
  diagram->add_option("--dim", sim.dim, "homology dimension label")->check(CLI::Range(0, 2));
  for (auto* sub : {circle, lattice, diagram}) {
    sub->add_option("--seed", sim.seed, "random seed");
    sub->add_option("--out", sim.out, "output file")->required();
  }

  ClassifyArgs cls;
  auto* classify = app.add_subcommand("classify", "Bayes-factor classification with k-fold cross-validation");
  classify->add_option("--class1-dir", cls.class1_dir, "diagrams of class 1")->required();
  classify->add_option("--class2-dir", cls.class2_dir, "diagrams of class 2")->required();
  classify->add_option("--folds", cls.folds, "number of folds")->check(CLI::Range(2, 1000));
  classify->add_option("--prior-mode", cls.prior_mode, "kmeans:k=3,var=2 or flat:mean=1,1,var=20");
  classify->add_option("--alpha", cls.alpha, "detection probability");
  classify->add_option("--sigma-yo", cls.sigma_yo, "likelihood variance");
  classify->add_option("--clutter", cls.clutter, "clutter mixture JSON");
  classify->add_option("--mode", cls.mode, "paper-literal or mass-consistent");
  classify->add_option("--threshold", cls.threshold, "Bayes factor threshold");
  classify->add_option("--bootstrap", cls.bootstrap, "bootstrap resamples")->check(CLI::Range(1, 10000000));
  classify->add_option("--dim", cls.dim, "homology dimension")->check(CLI::Range(0, 2));
  classify->add_option("--seed", cls.seed, "random seed");
  classify->add_option("--report", cls.report, "report JSON")->required();

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "run a named preset or a JSON experiment config");
  experiment->add_option("--preset", exp.preset, "preset name");
  experiment->add_option("--config", exp.config, "experiment config JSON");
  experiment->add_option("--out-dir", exp.out_dir, "artifact directory");
  experiment->add_option("--seed", exp.seed, "override the seed");
  experiment->add_flag("--list", exp.list, "list presets");
  experiment->add_flag("--validate", exp.validate_only, "check the config without running");

  std::vector<std::string> validate_files, validate_presets;
  bool validate_all = false;
  auto* validate = app.add_subcommand("config-validate", "check config files and presets");
  validate->add_option("files", validate_files, "JSON config files");
  validate->add_option("--preset", validate_presets, "preset names");
  validate->add_flag("--all-presets", validate_all, "check every shipped preset");

  auto* version = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    if (*compute) run_compute_pd(cpd);
    if (*posterior) run_posterior(post);
    if (*circle) write_point_cloud(sample_noisy_circle(sim.n, sim.noise_var, sim.seed), sim.out);
    if (*lattice) {
      LatticeSpec spec{parse_lattice_type(sim.type), sim.cells, sim.constant, sim.retention, sim.noise};
      write_point_cloud(sample_lattice(spec, sim.seed), sim.out);
    }
    if (*diagram) {
      GenerativeModel model{read_mixture(sim.prior), parse_observation_model(read_json_file(sim.model))};
      SamplerOptions options;
      options.homology_dim = sim.dim;
      write_diagram(sample_observed_diagram(model, sim.seed, options), sim.out);
    }
    if (*classify) run_classify(cls);
    if (*experiment) run_experiment_command(exp, *experiment);
    if (*validate) {
      if (validate_files.empty() && validate_presets.empty() && !validate_all) {
        throw UsageError("config-validate: nothing to check");
      }
      return config_validate(validate_files, validate_presets, validate_all);
    }
    if (*version) std::cout << "pdbayes " << PDBAYES_VERSION << "\n";
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return 0;
}

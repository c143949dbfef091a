#include <doctest.h>

#include "pdbayes/error.hpp"
#include "pdbayes/experiment.hpp"
#include "pdbayes/format.hpp"
#include "pdbayes/intensity_io.hpp"
#include "test_support.hpp"

using namespace pdbayes;
using nlohmann::json;

TEST_SUITE("experiment") {

TEST_CASE("prior presets") {
  CHECK(prior_preset("informative") == Mixture::single(1, Vector2d(0.5, 1.2), 0.01));
  CHECK(prior_preset("weakly-informative") == Mixture::single(1, Vector2d(0.5, 1.2), 0.2));
  CHECK(prior_preset("unimodal-uninformative") == Mixture::single(1, Vector2d(1, 1), 1));
  CHECK(prior_preset("bimodal-uninformative") ==
        Mixture({{1, Vector2d(0.5, 0.5), 0.2}, {2, Vector2d(1.5, 1.5), 0.2}}));
  CHECK_THROWS_AS(prior_preset("flat"), UsageError);
  CHECK(circle_clutter(0.1) == Mixture::single(1, Vector2d(0.5, 0), 0.1));
}

TEST_CASE("case presets") {
  const auto c1 = experiment_preset("case1-informative");
  CHECK(c1.posterior.observation.alpha == 1);
  CHECK(c1.posterior.observation.likelihood_variance == 0.01);
  CHECK(c1.posterior.observation.clutter == circle_clutter(0.1));
  CHECK(c1.posterior.circle_noise_variance == 0.001);
  const auto c4 = experiment_preset("case4-bimodal-uninformative-v3");
  CHECK(c4.posterior.observation.alpha == 0.5);
  CHECK(c4.posterior.circle_noise_variance == 0.1);
  CHECK(c4.posterior.observation.likelihood_variance == 0.01);
  CHECK(experiment_preset("case2-informative-v2").posterior.observation.clutter == circle_clutter(1));
  CHECK(experiment_preset("aptlike-cv").kind == ExperimentConfig::Kind::Classification);
  try {
    experiment_preset("case9");
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("aptlike-cv") != std::string::npos);
  }
}

TEST_CASE("every preset expands and validates") {
  for (const auto& name : experiment_preset_names()) {
    const auto doc = to_json(experiment_preset(name));
    CHECK(validate_config(doc) == "experiment");
    CHECK(to_json(parse_experiment_config(doc)).dump() == doc.dump());
  }
}

TEST_CASE("config parsing") {
  const auto cfg = parse_experiment_config(parse_json_text(R"({
    "kind": "posterior", "name": "mine", "seed": 11,
    "prior": [{"weight": 2, "mean": [1, 1], "variance": 0.3}],
    "observation": {"alpha": 0.5, "sigma_yo": 0.1, "sigma_ys": 1},
    "data": {"source": "circle", "n_points": 30, "noise_variance": 0.01},
    "grid": {"nx": 10, "ny": 20}
  })"));
  CHECK(cfg.seed == 11);
  CHECK(cfg.posterior.prior == Mixture::single(2, Vector2d(1, 1), 0.3));
  CHECK(cfg.posterior.observation.clutter == circle_clutter(1));
  CHECK(cfg.posterior.circle_points == 30);
  CHECK(cfg.posterior.grid.nx == 10);
  CHECK(cfg.posterior.grid.x1 == 3);

  const auto over = parse_experiment_config(parse_json_text(R"({"preset": "case1-informative", "seed": 3})"));
  CHECK(over.seed == 3);
  CHECK(over.posterior.prior_name == "informative");

  CHECK_THROWS_AS(parse_experiment_config(parse_json_text(R"({"kind": "posterior"})")), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config(parse_json_text(R"({"kind": "posterior", "prior": "informative",
      "observation": {"alpha": 2, "sigma_yo": 0.1}})")), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config(parse_json_text(R"({"kind": "other"})")), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config(parse_json_text(R"({"kind": "posterior", "prior": "informative",
      "grid": {"nx": 0}})")), ValidationError);
  CHECK_THROWS_AS(parse_experiment_config(parse_json_text(R"({"kind": "classification",
      "priors": ["kmeans:k=3,var=2"], "folds": 1})")), ValidationError);
  CHECK(validate_config(parse_json_text(R"([{"weight": 1, "mean": [0, 0], "variance": 1}])")) == "mixture");
  CHECK(validate_config(parse_json_text(R"({"alpha": 1, "sigma_yo": 0.1, "clutter": []})")) == "observation-model");
  CHECK_THROWS_AS(validate_config(parse_json_text(R"({"x": 1})")), ValidationError);
}

TEST_CASE("case I posterior peaks at the prominent loop") {
  const auto dir = testing::scratch_dir("case1");
  const auto manifest = run_experiment(experiment_preset("case1-informative"), dir);
  CHECK(manifest["argmax_distance_to_most_persistent"].get<double>() <= 0.2);
  for (const auto& f : manifest["artifacts"]) CHECK(std::filesystem::exists(dir / f.get<std::string>()));
  const auto back = parse_experiment_config(read_json_file(dir / "manifest.json")["config"]);
  CHECK(to_json(back).dump() == manifest["config"].dump());
}

TEST_CASE("case IV retains half the prior mass") {
  const auto dir = testing::scratch_dir("case4");
  const auto m = run_experiment(experiment_preset("case4-informative"), dir)["masses"];
  CHECK(m["retention_mass"].get<double>() == 0.5 * m["prior_mass"].get<double>());
  CHECK(m["total_mass"].get<double>() == m["retention_mass"].get<double>() + m["data_mass"].get<double>());
}

TEST_CASE("posterior study from diagram files") {
  const auto dir = testing::scratch_dir("files");
  write_file_atomic(dir / "d.csv", "birth,death,dim\n0.5,1.7,1\n0.1,0.2,0\n");
  auto cfg = experiment_preset("case2-weakly-informative");
  cfg.posterior.diagram_files = {(dir / "d.csv").string()};
  cfg.posterior.grid = {0, 3, 0, 3, 31, 31};
  const auto m = run_experiment(cfg, dir / "out");
  CHECK(m["observed_feature_counts"][0] == 1);
  CHECK(read_text_file(dir / "out" / "observed_1.csv") == "birth,death,dim\n0.5,1.7,1\n");
}

TEST_CASE("runs are byte identical") {
  auto cfg = experiment_preset("case3-bimodal-uninformative");
  cfg.posterior.grid = {0, 3, 0, 3, 40, 40};
  const auto a = testing::scratch_dir("repeat_a");
  const auto b = testing::scratch_dir("repeat_b");
  run_experiment(cfg, a);
  run_experiment(cfg, b);
  for (const auto& entry : std::filesystem::directory_iterator(a)) {
    CHECK(read_text_file(entry.path()) == read_text_file(b / entry.path().filename()));
  }
}

}

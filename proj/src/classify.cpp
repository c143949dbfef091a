#include "pdbayes/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pdbayes/error.hpp"
#include "pdbayes/format.hpp"
#include "pdbayes/intensity_io.hpp"
#include "pdbayes/kmeans.hpp"
#include "pdbayes/random.hpp"

namespace pdbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <typename LogIntensity>
double log_density_impl(const LogIntensity& log_intensity, double mass, const PersistenceDiagram& diagram) {
  if (diagram.frame != Frame::Tilted) throw DomainError("log_poisson_density: diagram must be tilted");
  double sum = -mass - std::lgamma(static_cast<double>(diagram.size()) + 1.0);
  for (const auto& f : diagram.features) {
    const double l = log_intensity(f.point);
    if (l == kNegInf) return kNegInf;
    sum += l;
  }
  return sum;
}

// x0 + sum(x_i - x0) / n: exact when all values coincide.
double stable_mean(const std::vector<double>& values) {
  if (values.empty()) return 0;
  const double base = values.front();
  double dev = 0;
  for (double v : values) dev += v - base;
  return base + dev / static_cast<double>(values.size());
}

// Linear interpolation between order statistics (R's type 7).
double percentile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  return idx;
}

nlohmann::json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

std::string to_string(DensityMode mode) {
  return mode == DensityMode::PaperLiteral ? "paper-literal" : "mass-consistent";
}

DensityMode parse_density_mode(const std::string& name) {
  if (name == "paper-literal") return DensityMode::PaperLiteral;
  if (name == "mass-consistent") return DensityMode::MassConsistent;
  throw DomainError("unknown density mode '" + name + "' (expected paper-literal or mass-consistent)");
}

double log_poisson_density(const Mixture& intensity, const PersistenceDiagram& diagram) {
  return log_density_impl([&](const Vector2d& x) { return intensity.log_evaluate(x); }, intensity.total_mass(),
                          diagram);
}

double log_poisson_density_with_mass(const PosteriorIntensity& intensity, double mass,
                                     const PersistenceDiagram& diagram) {
  return log_density_impl([&](const Vector2d& x) { return intensity.log_evaluate(x); }, mass, diagram);
}

double log_poisson_density(const PosteriorIntensity& intensity, const PersistenceDiagram& diagram,
                           DensityMode mode) {
  const double mass =
      mode == DensityMode::PaperLiteral ? intensity.prior().total_mass() : intensity.total_mass();
  return log_poisson_density_with_mass(intensity, mass, diagram);
}

PosteriorIntensity ClassModel::posterior() const {
  if (training_set.empty()) throw DomainError("class model '" + label + "' has no training diagrams");
  return posterior_closed_form(prior, observation, training_set);
}

double posterior_predictive_logdensity(const ClassModel& model, const PersistenceDiagram& diagram,
                                       DensityMode mode) {
  return log_poisson_density(model.posterior(), diagram, mode);
}

BayesFactor decide(double log_density1, double log_density2, double threshold) {
  if (!(threshold > 0)) throw DomainError("Bayes factor threshold must be positive");
  BayesFactor bf;
  bf.log_density1 = log_density1;
  bf.log_density2 = log_density2;
  if (log_density1 == kNegInf && log_density2 == kNegInf) {
    bf.undecidable = true;
    bf.log_bf = std::numeric_limits<double>::quiet_NaN();
    bf.assignment = 0;
    return bf;
  }
  bf.log_bf = log_density1 - log_density2;
  bf.assignment = bf.log_bf > std::log(threshold) ? 1 : 2;
  return bf;
}

BayesFactor bayes_factor(const ClassModel& model1, const ClassModel& model2, const PersistenceDiagram& diagram,
                         double threshold, DensityMode mode) {
  return decide(posterior_predictive_logdensity(model1, diagram, mode),
                posterior_predictive_logdensity(model2, diagram, mode), threshold);
}

Mixture kmeans_prior(const std::vector<PersistenceDiagram>& training, int k, double variance, double weight,
                     std::uint64_t seed, int restarts) {
  std::vector<Vector2d> pooled;
  for (const auto& d : training) {
    for (const auto& f : d.features) pooled.push_back(f.point);
  }
  if (pooled.size() < static_cast<std::size_t>(std::max(k, 1))) {
    throw DomainError("kmeans_prior: " + std::to_string(pooled.size()) + " pooled features for k = " +
                      std::to_string(k));
  }
  const auto clusters = kmeans(pooled, k, seed, {.restarts = restarts});
  std::vector<Component> comps;
  for (const auto& c : clusters.centers) comps.push_back({weight, c, variance});
  return Mixture(std::move(comps));
}

std::vector<RocPoint> roc_curve(const std::vector<double>& positive_scores,
                                const std::vector<double>& negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw DomainError("roc_curve: need at least one score per class");
  }
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  // Undecidable (NaN) scores carry no evidence either way.
  auto clean = [](double s) { return std::isnan(s) ? 0.0 : s; };
  for (double s : positive_scores) all.push_back({clean(s), true});
  for (double s : negative_scores) all.push_back({clean(s), false});
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

  const double np = static_cast<double>(positive_scores.size());
  const double nn = static_cast<double>(negative_scores.size());
  std::vector<RocPoint> roc{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < all.size();) {
    const double s = all[i].score;
    while (i < all.size() && all[i].score == s) {
      (all[i].positive ? tp : fp) += 1;
      ++i;
    }
    roc.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np, s});
  }
  return roc;
}

double auc_trapezoid(const std::vector<RocPoint>& roc) {
  double area = 0;
  for (std::size_t i = 1; i < roc.size(); ++i) {
    area += (roc[i].fpr - roc[i - 1].fpr) * 0.5 * (roc[i].tpr + roc[i - 1].tpr);
  }
  return area;
}

BootstrapSummary bootstrap_auc(const std::vector<double>& fold_aucs, int resamples, std::uint64_t seed) {
  if (fold_aucs.empty()) throw DomainError("bootstrap_auc: no fold AUCs");
  if (resamples < 1) throw DomainError("bootstrap_auc: resamples must be >= 1");
  Rng rng(seed);
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(resamples));
  std::vector<double> draw(fold_aucs.size());
  for (int r = 0; r < resamples; ++r) {
    for (auto& v : draw) v = fold_aucs[rng.below(fold_aucs.size())];
    means.push_back(stable_mean(draw));
  }
  BootstrapSummary out;
  out.resamples = resamples;
  out.mean = stable_mean(means);
  out.p5 = percentile(means, 0.05);
  out.p95 = percentile(means, 0.95);
  return out;
}

PriorSpec PriorSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  PriorSpec spec;
  if (kind == "kmeans") {
    spec.kind = Kind::KMeans;
  } else if (kind == "flat") {
    spec.kind = Kind::Flat;
    spec.variance = 20.0;
  } else {
    throw DomainError("prior mode must start with 'kmeans:' or 'flat:', got '" + text + "'");
  }
  if (colon == std::string::npos) return spec;

  // Split on commas; a token without '=' continues the previous value
  // (so "mean=1,1" stays together).
  std::vector<std::pair<std::string, std::string>> kv;
  std::size_t start = colon + 1;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string token(trim(std::string_view(text).substr(start, comma - start)));
    const auto eq = token.find('=');
    if (eq != std::string::npos) {
      kv.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    } else if (!kv.empty() && !token.empty()) {
      kv.back().second += "," + token;
    } else if (!token.empty()) {
      throw DomainError("malformed prior mode token '" + token + "'");
    }
    start = comma + 1;
  }
  for (const auto& [key, value] : kv) {
    if (key == "k") {
      spec.k = static_cast<int>(parse_integer(value));
    } else if (key == "var" || key == "variance") {
      spec.variance = parse_double(value);
    } else if (key == "weight") {
      spec.weight = parse_double(value);
    } else if (key == "sample") {
      spec.kmeans_sample = static_cast<int>(parse_integer(value));
    } else if (key == "mean") {
      const auto comma = value.find(',');
      if (comma == std::string::npos) throw DomainError("prior mean needs two coordinates");
      spec.mean = Vector2d(parse_double(value.substr(0, comma)), parse_double(value.substr(comma + 1)));
    } else {
      throw DomainError("unknown prior mode key '" + key + "'");
    }
  }
  if (spec.k < 1 || !(spec.variance > 0) || !(spec.weight > 0) || spec.kmeans_sample < 1) {
    throw DomainError("prior mode parameters must be positive");
  }
  return spec;
}

std::string PriorSpec::describe() const {
  if (kind == Kind::KMeans) {
    return "kmeans:k=" + std::to_string(k) + ",var=" + format_double(variance) + ",weight=" +
           format_double(weight) + ",sample=" + std::to_string(kmeans_sample);
  }
  return "flat:mean=" + format_double(mean(0)) + "," + format_double(mean(1)) + ",var=" +
         format_double(variance) + ",weight=" + format_double(weight);
}

BayesFactorReport cross_validate(const std::vector<PersistenceDiagram>& class1,
                                 const std::vector<PersistenceDiagram>& class2,
                                 const CrossValidationConfig& config) {
  if (config.folds < 2) throw DomainError("cross_validate: need at least 2 folds");
  if (class1.size() < static_cast<std::size_t>(config.folds) ||
      class2.size() < static_cast<std::size_t>(config.folds)) {
    throw DomainError("cross_validate: each class needs at least " + std::to_string(config.folds) +
                      " diagrams (got " + std::to_string(class1.size()) + " and " +
                      std::to_string(class2.size()) + ")");
  }
  const std::vector<const std::vector<PersistenceDiagram>*> classes{&class1, &class2};

  // Stratified assignment: shuffle each class, deal positions round-robin.
  std::vector<std::vector<std::size_t>> order(2);
  std::vector<std::vector<int>> fold_of(2);
  for (int c = 0; c < 2; ++c) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(c)));
    order[c] = shuffled_indices(classes[c]->size(), rng);
    fold_of[c].assign(classes[c]->size(), 0);
    for (std::size_t pos = 0; pos < order[c].size(); ++pos) {
      fold_of[c][order[c][pos]] = static_cast<int>(pos % static_cast<std::size_t>(config.folds));
    }
  }

  ObservationModel observation{config.alpha, config.likelihood_variance, config.clutter};
  observation.validate();

  BayesFactorReport report;
  report.config = config;
  std::vector<double> fold_aucs;
  for (int fold = 0; fold < config.folds; ++fold) {
    ClassModel models[2];
    for (int c = 0; c < 2; ++c) {
      auto& model = models[c];
      model.label = c == 0 ? config.class1_label : config.class2_label;
      model.observation = observation;
      for (std::size_t i : order[c]) {
        if (fold_of[c][i] != fold) model.training_set.push_back((*classes[c])[i]);
      }
      if (config.prior.kind == PriorSpec::Kind::Flat) {
        model.prior = Mixture::single(config.prior.weight, config.prior.mean, config.prior.variance);
      } else {
        const auto take = std::min<std::size_t>(model.training_set.size(),
                                                static_cast<std::size_t>(config.prior.kmeans_sample));
        const std::vector<PersistenceDiagram> sample(model.training_set.begin(),
                                                     model.training_set.begin() + static_cast<long>(take));
        model.prior = kmeans_prior(sample, config.prior.k, config.prior.variance, config.prior.weight,
                                   derive_seed(config.seed, 1000 + 2 * static_cast<std::uint64_t>(fold) + c),
                                   config.kmeans_restarts);
      }
    }
    const PosteriorIntensity posteriors[2] = {models[0].posterior(), models[1].posterior()};

    FoldResult result;
    result.fold = fold;
    result.prior1 = models[0].prior;
    result.prior2 = models[1].prior;
    std::vector<double> scores[2];
    for (int c = 0; c < 2; ++c) {
      for (std::size_t i = 0; i < classes[c]->size(); ++i) {
        if (fold_of[c][i] != fold) continue;
        const auto& d = (*classes[c])[i];
        ScoredDiagram scored;
        scored.true_class = c + 1;
        scored.index = i;
        scored.label = d.label.value_or("");
        scored.fold = fold;
        scored.score = decide(log_poisson_density(posteriors[0], d, config.mode),
                              log_poisson_density(posteriors[1], d, config.mode), config.threshold);
        scores[c].push_back(scored.score.log_bf);
        report.diagrams.push_back(std::move(scored));
      }
    }
    result.roc = roc_curve(scores[0], scores[1]);
    result.auc = auc_trapezoid(result.roc);
    fold_aucs.push_back(result.auc);
    report.folds.push_back(std::move(result));
  }

  std::vector<double> pooled[2];
  std::size_t correct = 0;
  for (const auto& d : report.diagrams) {
    pooled[d.true_class - 1].push_back(d.score.log_bf);
    if (d.score.assignment == d.true_class) ++correct;
  }
  report.pooled_roc = roc_curve(pooled[0], pooled[1]);
  report.pooled_auc = auc_trapezoid(report.pooled_roc);
  report.accuracy = static_cast<double>(correct) / static_cast<double>(report.diagrams.size());
  report.mean_auc = stable_mean(fold_aucs);
  report.bootstrap = bootstrap_auc(fold_aucs, config.bootstrap_resamples, derive_seed(config.seed, 99));
  return report;
}

nlohmann::json to_json(const BayesFactorReport& report) {
  using nlohmann::json;
  const auto& cfg = report.config;
  auto roc_json = [](const std::vector<RocPoint>& roc) {
    json out = json::array();
    for (const auto& p : roc) out.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", number_or_string(p.threshold)}});
    return out;
  };
  json doc;
  doc["config"] = {{"folds", cfg.folds},
                   {"prior_mode", cfg.prior.describe()},
                   {"alpha", cfg.alpha},
                   {"sigma_yo", cfg.likelihood_variance},
                   {"clutter", mixture_to_json(cfg.clutter)},
                   {"density_mode", to_string(cfg.mode)},
                   {"threshold", cfg.threshold},
                   {"seed", cfg.seed},
                   {"bootstrap_resamples", cfg.bootstrap_resamples},
                   {"kmeans_restarts", cfg.kmeans_restarts},
                   {"class1", cfg.class1_label},
                   {"class2", cfg.class2_label}};
  doc["density_mode"] = to_string(cfg.mode);
  doc["threshold"] = cfg.threshold;
  json diagrams = json::array();
  for (const auto& d : report.diagrams) {
    diagrams.push_back({{"class", d.true_class},
                        {"index", d.index},
                        {"label", d.label},
                        {"fold", d.fold},
                        {"log_density1", number_or_string(d.score.log_density1)},
                        {"log_density2", number_or_string(d.score.log_density2)},
                        {"log_bayes_factor", number_or_string(d.score.log_bf)},
                        {"undecidable", d.score.undecidable},
                        {"assignment", d.score.assignment}});
  }
  doc["diagrams"] = std::move(diagrams);
  json folds = json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"auc", f.auc},
                     {"roc_points", roc_json(f.roc)},
                     {"prior1", mixture_to_json(f.prior1)},
                     {"prior2", mixture_to_json(f.prior2)}});
  }
  doc["folds"] = std::move(folds);
  doc["roc_points"] = roc_json(report.pooled_roc);
  doc["pooled_auc"] = report.pooled_auc;
  doc["auc"] = report.mean_auc;
  doc["accuracy"] = report.accuracy;
  doc["bootstrap_summary"] = {{"p5", report.bootstrap.p5},
                              {"mean", report.bootstrap.mean},
                              {"p95", report.bootstrap.p95},
                              {"resamples", report.bootstrap.resamples}};
  return doc;
}

}  // namespace pdbayes

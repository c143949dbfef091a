#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdbayes/diagram.hpp"
#include "pdbayes/intensity.hpp"
#include "pdbayes/posterior.hpp"

namespace pdbayes {

// How the e^{-lambda} factor of the Poisson density is chosen when the
// intensity is a posterior. PaperLiteral keeps the prior mass; MassConsistent
// uses the posterior's own mass (the proper Poisson-process density).
enum class DensityMode { PaperLiteral, MassConsistent };

std::string to_string(DensityMode mode);
DensityMode parse_density_mode(const std::string& name);

// log p(D) = -mass + sum_{d in D} log lambda(d) - log |D|!
// Returns -infinity when lambda vanishes at some point of D.
double log_poisson_density(const Mixture& intensity, const PersistenceDiagram& diagram);
double log_poisson_density(const PosteriorIntensity& intensity, const PersistenceDiagram& diagram,
                           DensityMode mode = DensityMode::PaperLiteral);
double log_poisson_density_with_mass(const PosteriorIntensity& intensity, double mass,
                                     const PersistenceDiagram& diagram);

struct ClassModel {
  std::string label;
  Mixture prior;
  ObservationModel observation;
  std::vector<PersistenceDiagram> training_set;

  PosteriorIntensity posterior() const;
};

double posterior_predictive_logdensity(const ClassModel& model, const PersistenceDiagram& diagram,
                                       DensityMode mode = DensityMode::PaperLiteral);

struct BayesFactor {
  double log_density1 = 0;
  double log_density2 = 0;
  double log_bf = 0;       // log_density1 - log_density2
  bool undecidable = false;  // both densities vanish
  int assignment = 0;      // 1, 2, or 0 when undecidable
};

// Class 1 iff log BF > log(threshold).
BayesFactor decide(double log_density1, double log_density2, double threshold = 1.0);

BayesFactor bayes_factor(const ClassModel& model1, const ClassModel& model2, const PersistenceDiagram& diagram,
                         double threshold = 1.0, DensityMode mode = DensityMode::PaperLiteral);

// Pools the features of all training diagrams, clusters them, and returns a
// mixture with the cluster centres as means and a shared variance and weight.
Mixture kmeans_prior(const std::vector<PersistenceDiagram>& training, int k, double variance, double weight,
                     std::uint64_t seed, int restarts = 50);

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
  double threshold = 0;
};

// Class 1 scores are positives. Tied scores form one threshold step.
std::vector<RocPoint> roc_curve(const std::vector<double>& positive_scores,
                                const std::vector<double>& negative_scores);
double auc_trapezoid(const std::vector<RocPoint>& roc);

struct BootstrapSummary {
  double p5 = 0;
  double mean = 0;
  double p95 = 0;
  int resamples = 0;
};

// Distribution of the mean of `fold_aucs` under resampling with replacement.
BootstrapSummary bootstrap_auc(const std::vector<double>& fold_aucs, int resamples, std::uint64_t seed);

struct PriorSpec {
  enum class Kind { KMeans, Flat };
  Kind kind = Kind::KMeans;
  int k = 3;
  double variance = 2.0;
  double weight = 1.0;
  Vector2d mean = Vector2d(1.0, 1.0);  // flat prior only
  int kmeans_sample = 50;  // training diagrams pooled per class for k-means

  // "kmeans:k=3,var=2[,weight=1][,sample=50]" or "flat:mean=1,1,var=20[,weight=1]"
  static PriorSpec parse(const std::string& text);
  std::string describe() const;
};

struct CrossValidationConfig {
  int folds = 10;
  PriorSpec prior;
  double alpha = 1.0;
  double likelihood_variance = 0.1;
  Mixture clutter = Mixture::single(5.0, Vector2d(0.0, 0.0), 0.2);
  DensityMode mode = DensityMode::PaperLiteral;
  double threshold = 1.0;
  std::uint64_t seed = 7;
  int bootstrap_resamples = 2000;
  int kmeans_restarts = 50;
  std::string class1_label = "class1";
  std::string class2_label = "class2";
};

struct ScoredDiagram {
  int true_class = 1;
  std::size_t index = 0;  // position in the class input list
  std::string label;
  int fold = 0;
  BayesFactor score;
};

struct FoldResult {
  int fold = 0;
  double auc = 0;
  std::vector<RocPoint> roc;
  Mixture prior1;
  Mixture prior2;
};

struct BayesFactorReport {
  CrossValidationConfig config;
  std::vector<ScoredDiagram> diagrams;
  std::vector<FoldResult> folds;
  std::vector<RocPoint> pooled_roc;
  double pooled_auc = 0;
  double mean_auc = 0;
  double accuracy = 0;
  BootstrapSummary bootstrap;
};

// Stratified k-fold evaluation of the Bayes-factor classifier. Diagrams must
// be tilted and restricted to the homology dimension of interest.
BayesFactorReport cross_validate(const std::vector<PersistenceDiagram>& class1,
                                 const std::vector<PersistenceDiagram>& class2,
                                 const CrossValidationConfig& config);

nlohmann::json to_json(const BayesFactorReport& report);

}  // namespace pdbayes

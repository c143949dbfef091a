#include <doctest.h>

#include <cmath>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>

#include "pdbayes/error.hpp"
#include "pdbayes/random.hpp"
#include "pdbayes/rips.hpp"
#include "pdbayes/simulate.hpp"
#include "test_support.hpp"

using namespace pdbayes;

namespace {

// Lambda([lo0, hi0] x [lo1, hi1]) for a mixture, clipped to the wedge.
double box_mass(const Mixture& m, double lo0, double hi0, double lo1, double hi1) {
  double total = 0;
  for (const auto& c : m.components()) {
    const double sd = std::sqrt(c.variance);
    auto strip = [&](double lo, double hi, double mu) {
      return testing::boost_phi((hi - mu) / sd) - testing::boost_phi((std::max(lo, 0.0) - mu) / sd);
    };
    total += c.weight * strip(lo0, hi0, c.mean(0)) * strip(lo1, hi1, c.mean(1));
  }
  return total;
}

const std::vector<double> kStrips{0.0, 0.5, 1.0, 1.5, 2.0, HUGE_VAL};

std::size_t strip_of(double birth) {
  std::size_t k = 0;
  while (birth >= kStrips[k + 1]) ++k;
  return k;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("rng basics") {
  Rng rng(42);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0);
    CHECK(u < 1);
    CHECK(rng.below(7) < 7);
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 4 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1) < 0.02);
  CHECK(Rng(5).next_u64() == Rng(5).next_u64());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  // The 10000th output of a default-seeded mt19937_64, fixed by the standard.
  std::mt19937_64 reference;
  reference.discard(9999);
  CHECK(reference() == 9981545732273789042ULL);
}

TEST_CASE("empty intensity gives empty diagrams") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(sample_poisson_pp(Mixture(), seed).empty());
}

TEST_CASE("cardinality mean") {
  const auto m = Mixture::single(4, Vector2d(10, 10), 0.01);
  double total = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) total += static_cast<double>(sample_poisson_pp(m, seed).size());
  CHECK(std::abs(total / 10000 - 4) <= 0.06);
}

TEST_CASE("region counts match the intensity measure") {
  const Mixture m({{1.5, Vector2d(0.5, 0.5), 0.2}, {1, Vector2d(1.2, 0.3), 0.1}});
  const double expected = box_mass(m, 0, 1, 0, 1);
  double count = 0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    for (const auto& f : sample_poisson_pp(m, derive_seed(99, s)).features) {
      count += (f.point(0) <= 1 && f.point(1) <= 1);
    }
  }
  // Region counts of a Poisson process are Poisson, so variance = mean.
  CHECK(std::abs(count / draws - expected) <= 3 * std::sqrt(expected / draws));
}

TEST_CASE("superposition") {
  const Mixture a = Mixture::single(1.5, Vector2d(0.5, 0.5), 0.2);
  const Mixture b = Mixture::single(1.0, Vector2d(1.5, 1.0), 0.3);
  const Mixture sum = a.concat(b);
  std::vector<double> union_counts(5, 0), summed_counts(5, 0);
  for (int s = 0; s < 10000; ++s) {
    for (const auto& f : sample_poisson_pp(a, derive_seed(1, s)).features) union_counts[strip_of(f.point(0))] += 1;
    for (const auto& f : sample_poisson_pp(b, derive_seed(2, s)).features) union_counts[strip_of(f.point(0))] += 1;
    for (const auto& f : sample_poisson_pp(sum, derive_seed(3, s)).features) summed_counts[strip_of(f.point(0))] += 1;
  }
  std::vector<double> expected_union(5), expected_summed(5);
  const double mass = sum.total_mass();
  const double n_union = std::accumulate(union_counts.begin(), union_counts.end(), 0.0);
  const double n_summed = std::accumulate(summed_counts.begin(), summed_counts.end(), 0.0);
  for (std::size_t k = 0; k < 5; ++k) {
    const double share = box_mass(sum, kStrips[k], kStrips[k + 1], 0, HUGE_VAL) / mass;
    expected_union[k] = share * n_union;
    expected_summed[k] = share * n_summed;
  }
  CHECK(testing::chi_square_p_value(union_counts, expected_union) > 0.001);
  CHECK(testing::chi_square_p_value(summed_counts, expected_summed) > 0.001);
  CHECK(std::abs(n_union / 10000 - mass) <= 3 * std::sqrt(mass / 10000));
}

TEST_CASE("thinning is binomial") {
  PersistenceDiagram latent;
  for (int i = 0; i < 100; ++i) latent.features.push_back({Vector2d(1 + 0.01 * i, 1), 1});
  const GenerativeModel model{Mixture(), {0.5, 0.01, Mixture()}};
  const int draws = 10000;
  // Bins: <= 42, 43..45, 46..48, 49..51, 52..54, 55..57, >= 58.
  const std::vector<int> edges{42, 45, 48, 51, 54, 57};
  std::vector<double> observed(edges.size() + 1, 0);
  for (int s = 0; s < draws; ++s) {
    const auto n = static_cast<int>(sample_observation(model, latent, derive_seed(5, s)).size());
    std::size_t bin = 0;
    while (bin < edges.size() && n > edges[bin]) ++bin;
    observed[bin] += 1;
  }
  boost::math::binomial binom(100, 0.5);
  std::vector<double> expected;
  double prev = 0;
  for (int e : edges) {
    const double c = boost::math::cdf(binom, e);
    expected.push_back((c - prev) * draws);
    prev = c;
  }
  expected.push_back((1 - prev) * draws);
  CHECK(testing::chi_square_p_value(observed, expected) > 0.001);
}

TEST_CASE("observation examples") {
  PersistenceDiagram latent;
  for (int i = 0; i < 20; ++i) latent.features.push_back({Vector2d(0.1 * i, 1 + 0.05 * i), 1});
  CHECK(sample_observation({Mixture(), {0.0, 0.1, Mixture()}}, latent, 3).empty());

  const auto sharp = sample_observation({Mixture(), {1.0, 1e-12, Mixture()}}, latent, 3);
  REQUIRE(sharp.size() == latent.size());
  for (std::size_t i = 0; i < latent.size(); ++i) {
    CHECK((sharp.features[i].point - latent.features[i].point).norm() <= 1e-4);
  }

  PersistenceDiagram hundred;
  for (int i = 0; i < 100; ++i) hundred.features.push_back({Vector2d(1, 1), 1});
  const Mixture clutter = Mixture::single(2 / wedge_gaussian_mass(Vector2d(0.5, 0), 0.1), Vector2d(0.5, 0), 0.1);
  const GenerativeModel model{Mixture(), {0.5, 0.1, clutter}};
  double total = 0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) total += static_cast<double>(sample_observation(model, hundred, s).size());
  const double expected = 50 + clutter.total_mass();
  CHECK(clutter.total_mass() == doctest::Approx(2.0).epsilon(1e-12));
  const double sd = std::sqrt(100 * 0.25 + clutter.total_mass());
  CHECK(std::abs(total / draws - expected) <= 3 * sd / std::sqrt(draws));
}

TEST_CASE("observed intensity follows the marking theorem") {
  // Deep inside the wedge the wedge restriction is negligible, so the marks
  // of N(mu, s) points blurred by N(0, r) are N(mu, s + r).
  const Mixture latent = Mixture::single(3, Vector2d(2, 2), 0.05);
  const Mixture clutter = Mixture::single(1, Vector2d(2, 2.2), 0.2);
  const GenerativeModel model{latent, {0.7, 0.05, clutter}};
  const double expected = 0.7 * box_mass(Mixture::single(3, Vector2d(2, 2), 0.1), 1.8, 2.2, 1.8, 2.5) +
                          box_mass(clutter, 1.8, 2.2, 1.8, 2.5);
  double count = 0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    for (const auto& f : sample_observed_diagram(model, derive_seed(8, s)).features) {
      count += (f.point(0) >= 1.8 && f.point(0) <= 2.2 && f.point(1) >= 1.8 && f.point(1) <= 2.5);
    }
  }
  CHECK(std::abs(count / draws - expected) <= 3 * std::sqrt(expected / draws));
}

TEST_CASE("sampling error for components outside the wedge") {
  CHECK_THROWS_AS(sample_poisson_pp(Mixture::single(1, Vector2d(-10, -10), 0.01), 1), SamplingError);
  Rng rng(1);
  SamplerOptions options;
  options.max_proposals = 10;
  CHECK_THROWS_AS(sample_wedge_gaussian(Vector2d(-5, -5), 1, rng, options), SamplingError);
}

TEST_CASE("determinism") {
  const Mixture m({{3, Vector2d(0.5, 0.5), 0.2}, {2, Vector2d(1.5, 1.5), 0.2}});
  const GenerativeModel model{m, {0.5, 0.1, Mixture::single(1, Vector2d(0.5, 0), 0.1)}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(sample_observed_diagram(model, seed).features == sample_observed_diagram(model, seed).features);
    CHECK(sample_noisy_circle(30, 0.01, seed) == sample_noisy_circle(30, 0.01, seed));
    CHECK(sample_lattice({}, seed) == sample_lattice({}, seed));
  }
  CHECK(sample_observed_diagram(model, 1).features != sample_observed_diagram(model, 2).features);
}

TEST_CASE("noisy circle") {
  const auto clean = sample_noisy_circle(40, 0, 3);
  for (Eigen::Index i = 0; i < clean.rows(); ++i) CHECK(std::abs(clean.row(i).norm() - 1) <= 1e-12);
  CHECK_THROWS_AS(sample_noisy_circle(2, 0.1, 1), DomainError);

  // Heavy noise: one loop still stands out on average, among more short ones
  // than the low-noise regime produces.
  double ratio = 0, noisy_count = 0, quiet_count = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto medium = testing::persistences(rips_persistence(sample_noisy_circle(50, 0.1, seed)), 1);
    REQUIRE(medium.size() >= 2);
    ratio += medium.back() / medium[medium.size() - 2] / 20;
    noisy_count += static_cast<double>(medium.size()) / 20;
    quiet_count += static_cast<double>(testing::persistences(rips_persistence(sample_noisy_circle(50, 0.001, seed)), 1).size()) / 20;
  }
  CHECK(ratio > 1.5);
  CHECK(noisy_count > quiet_count + 2);
}

TEST_CASE("lattice site counts") {
  CHECK(lattice_sites(LatticeType::Bcc, 1).rows() == 9);
  CHECK(lattice_sites(LatticeType::Fcc, 1).rows() == 14);
  CHECK(lattice_sites(LatticeType::Bcc, 2).rows() == 35);
  CHECK(lattice_sites(LatticeType::Fcc, 2).rows() == 63);
  CHECK(sample_lattice({LatticeType::Bcc, 1, 2.0, 1.0, 0.0}, 1).rows() == 9);
  CHECK(sample_lattice({LatticeType::Fcc, 1, 2.0, 1.0, 0.0}, 1).rows() == 14);
  CHECK(sample_lattice({LatticeType::Bcc, 2, 2.0, 1.0, 0.1}, 1).rows() == 35);
  const auto scaled = sample_lattice({LatticeType::Bcc, 1, 3.0, 1.0, 0.0}, 1);
  CHECK(scaled.maxCoeff() == 3.0);
  CHECK(scaled.minCoeff() == 0.0);
}

TEST_CASE("lattice retention and errors") {
  const LatticeSpec spec{LatticeType::Bcc, 2, 2.0, 0.35, 0.1};
  double total = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) total += static_cast<double>(sample_lattice(spec, s).rows());
  CHECK(std::abs(total / 2000 - 35 * 0.35) <= 3 * std::sqrt(35 * 0.35 * 0.65 / 2000));
  CHECK_THROWS_AS(sample_lattice({LatticeType::Bcc, 0, 2.0, 0.35, 0.1}, 1), DomainError);
  CHECK_THROWS_AS(sample_lattice({LatticeType::Bcc, 1, 2.0, 0.0, 0.1}, 1), DomainError);
  CHECK_THROWS_AS(parse_lattice_type("hcp"), DomainError);
  // With retention 1e-9 every site disappears.
  CHECK_THROWS_AS(sample_lattice({LatticeType::Bcc, 1, 2.0, 1e-9, 0.1}, 1), DomainError);
}

}

#include "pdbayes/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

#include "pdbayes/error.hpp"
#include "pdbayes/random.hpp"

namespace pdbayes {

namespace {

std::size_t distinct_count(const std::vector<Vector2d>& points) {
  std::set<std::pair<double, double>> seen;
  for (const auto& p : points) seen.emplace(p(0), p(1));
  return seen.size();
}

std::vector<Vector2d> plus_plus_seeds(const std::vector<Vector2d>& points, int k, Rng& rng) {
  std::vector<Vector2d> centers;
  centers.push_back(points[rng.below(points.size())]);
  std::vector<double> d2(points.size(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], (points[i] - centers.back()).squaredNorm());
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0) {
      double u = rng.uniform() * total;
      for (pick = 0; pick + 1 < points.size(); ++pick) {
        u -= d2[pick];
        if (u < 0) break;
      }
    }
    // A zero-weight pick would duplicate a centre; take the farthest point.
    if (d2[pick] == 0) pick = static_cast<std::size_t>(std::max_element(d2.begin(), d2.end()) - d2.begin());
    centers.push_back(points[pick]);
  }
  return centers;
}

KMeansResult lloyd(const std::vector<Vector2d>& points, std::vector<Vector2d> centers, int max_iterations) {
  const auto k = centers.size();
  KMeansResult result;
  result.assignment.assign(points.size(), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = (points[i] - centers[c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    // Means as first member + mean offset, so coincident points stay exact.
    std::vector<Vector2d> first(k), offsets(k, Vector2d::Zero());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(result.assignment[i]);
      if (counts[c]++ == 0) first[c] = points[i];
      offsets[c] += points[i] - first[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers[c] = first[c] + offsets[c] / static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: move it to the point farthest from its centre.
      std::size_t far = 0;
      double far_d = -1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = (points[i] - centers[result.assignment[i]]).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers[c] = points[far];
    }
  }
  result.inertia = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    result.inertia += (points[i] - centers[result.assignment[i]]).squaredNorm();
  }
  result.centers = std::move(centers);
  return result;
}

}  // namespace

KMeansResult kmeans(const std::vector<Vector2d>& points, int k, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (k < 1) throw DomainError("kmeans: k must be positive");
  if (static_cast<std::size_t>(k) > distinct_count(points)) {
    throw DomainError("kmeans: k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(distinct_count(points)) + " distinct points");
  }
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    auto candidate = lloyd(points, plus_plus_seeds(points, k, rng), options.max_iterations);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

}  // namespace pdbayes

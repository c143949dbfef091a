#pragma once

#include <cstdint>
#include <vector>

#include "pdbayes/types.hpp"

namespace pdbayes {

struct KMeansOptions {
  int restarts = 50;
  int max_iterations = 300;
};

struct KMeansResult {
  std::vector<Vector2d> centers;
  std::vector<int> assignment;
  double inertia = 0;  // sum of squared distances to assigned centres
};

// Lloyd iterations from k-means++ seeds; the restart with the lowest inertia
// wins. Deterministic for a given seed. Throws DomainError when k exceeds the
// number of distinct points.
KMeansResult kmeans(const std::vector<Vector2d>& points, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

}  // namespace pdbayes

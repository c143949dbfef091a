#pragma once

#include <cstddef>
#include <limits>

#include "pdbayes/diagram.hpp"
#include "pdbayes/types.hpp"

namespace pdbayes {

struct FiltrationParams {
  int max_homology_dim = 1;  // 0..2
  double max_radius = std::numeric_limits<double>::infinity();
  // Upper bound on the number of simplices kept in the filtration.
  std::size_t simplex_budget = 50'000'000;
};

// Vietoris-Rips persistence over Z/2. Each simplex enters at its diameter;
// simplices are ordered by (diameter, dimension, vertex tuple). Returns a
// tilted diagram of every finite, positive-persistence feature with
// dimension <= max_homology_dim. Essential classes are counted in
// `dropped_essential` and omitted.
PersistenceDiagram rips_persistence(const PointCloud& cloud, const FiltrationParams& params = {});

// One point per row, comma separated; `skip_header` drops the first
// non-empty line.
PointCloud parse_point_cloud_csv(const std::string& text, bool skip_header = false);
PointCloud read_point_cloud(const std::filesystem::path& path, bool skip_header = false);
std::string format_point_cloud_csv(const PointCloud& cloud);
void write_point_cloud(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace pdbayes

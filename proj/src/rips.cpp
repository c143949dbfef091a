#include "pdbayes/rips.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "pdbayes/error.hpp"
#include "pdbayes/format.hpp"

namespace pdbayes {

namespace {

constexpr std::size_t kMaxVertices = 65535;

struct Simplex {
  double diameter;
  int dim;
  std::array<std::uint16_t, 4> vertices;  // first dim+1 entries used, increasing
};

bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.diameter != b.diameter) return a.diameter < b.diameter;
  if (a.dim != b.dim) return a.dim < b.dim;
  return std::lexicographical_compare(a.vertices.begin(), a.vertices.begin() + a.dim + 1,
                                      b.vertices.begin(), b.vertices.begin() + b.dim + 1);
}

// Vertex tuples pack into 64 bits, 16 bits per vertex, offset by one so the
// empty slots never collide with vertex 0.
std::uint64_t key_of(const std::uint16_t* v, int count) {
  std::uint64_t key = 0;
  for (int i = 0; i < count; ++i) key = (key << 16) | (static_cast<std::uint64_t>(v[i]) + 1);
  return key;
}

class SimplexCollector {
 public:
  SimplexCollector(const Eigen::MatrixXd& dist, double max_radius, int top_dim, std::size_t budget)
      : dist_(dist), max_radius_(max_radius), top_dim_(top_dim), budget_(budget) {}

  std::vector<Simplex> collect() {
    const auto n = static_cast<std::uint16_t>(dist_.rows());
    neighbors_.assign(n, {});
    for (std::uint16_t i = 0; i < n; ++i) {
      for (std::uint16_t j = i + 1; j < n; ++j) {
        if (dist_(i, j) <= max_radius_) neighbors_[i].push_back(j);
      }
    }
    std::array<std::uint16_t, 4> current{};
    for (std::uint16_t v = 0; v < n; ++v) {
      current[0] = v;
      extend(current, 0, 0.0);
    }
    if (count_ > budget_) {
      throw ResourceError("Rips filtration needs " + std::to_string(count_) +
                              " simplices, budget is " + std::to_string(budget_),
                          count_);
    }
    return std::move(simplices_);
  }

 private:
  void extend(std::array<std::uint16_t, 4>& current, int dim, double diameter) {
    ++count_;
    if (count_ <= budget_) simplices_.push_back({diameter, dim, current});
    if (dim == top_dim_) return;
    const std::uint16_t last = current[dim];
    for (std::uint16_t w : neighbors_[last]) {
      double diam = std::max(diameter, dist_(last, w));
      bool ok = true;
      for (int i = 0; i < dim && ok; ++i) {
        const double d = dist_(current[i], w);
        ok = d <= max_radius_;
        diam = std::max(diam, d);
      }
      if (!ok) continue;
      current[dim + 1] = w;
      extend(current, dim + 1, diam);
    }
  }

  const Eigen::MatrixXd& dist_;
  double max_radius_;
  int top_dim_;
  std::size_t budget_;
  std::size_t count_ = 0;
  std::vector<std::vector<std::uint16_t>> neighbors_;
  std::vector<Simplex> simplices_;
};

using Column = std::vector<int>;

void add_column(Column& target, const Column& source, Column& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace

PersistenceDiagram rips_persistence(const PointCloud& cloud, const FiltrationParams& params) {
  if (cloud.rows() == 0) throw DomainError("rips_persistence: point cloud is empty");
  if (cloud.cols() < 1) throw DomainError("rips_persistence: ambient dimension must be >= 1");
  if (!cloud.allFinite()) throw DomainError("rips_persistence: point cloud has non-finite values");
  if (!(params.max_radius > 0)) throw DomainError("rips_persistence: max_radius must be positive");
  if (params.max_homology_dim < 0 || params.max_homology_dim > 2) {
    throw DomainError("rips_persistence: max_homology_dim must be in 0..2");
  }
  if (static_cast<std::size_t>(cloud.rows()) > kMaxVertices) {
    throw ResourceError("rips_persistence: at most 65535 points supported",
                        static_cast<std::size_t>(cloud.rows()));
  }

  const Eigen::Index n = cloud.rows();
  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = (cloud.row(i) - cloud.row(j)).norm();
    }
  }

  const int top_dim = params.max_homology_dim + 1;
  auto simplices = SimplexCollector(dist, params.max_radius, top_dim, params.simplex_budget).collect();
  std::sort(simplices.begin(), simplices.end(), filtration_less);

  const int total = static_cast<int>(simplices.size());
  std::unordered_map<std::uint64_t, int> index_of;
  index_of.reserve(simplices.size() * 2);
  for (int i = 0; i < total; ++i) {
    index_of.emplace(key_of(simplices[i].vertices.data(), simplices[i].dim + 1), i);
  }

  auto boundary = [&](int idx) {
    const auto& s = simplices[idx];
    Column col;
    std::array<std::uint16_t, 3> face{};
    for (int drop = 0; drop <= s.dim; ++drop) {
      int w = 0;
      for (int i = 0; i <= s.dim; ++i) {
        if (i != drop) face[w++] = s.vertices[i];
      }
      col.push_back(index_of.at(key_of(face.data(), s.dim)));
    }
    std::sort(col.begin(), col.end());
    return col;
  };

  std::vector<std::vector<int>> by_dim(top_dim + 1);
  for (int i = 0; i < total; ++i) by_dim[simplices[i].dim].push_back(i);

  // Column reduction with clearing, highest dimension first.
  std::vector<int> pivot_owner(total, -1);
  std::vector<char> cleared(total, 0);
  std::vector<Column> reduced(total);
  std::vector<std::size_t> negatives(top_dim + 2, 0);
  Column scratch;
  PersistenceDiagram out;
  out.frame = Frame::Tilted;

  for (int q = top_dim; q >= 1; --q) {
    for (int j : by_dim[q]) {
      if (cleared[j]) continue;
      Column col = boundary(j);
      while (!col.empty() && pivot_owner[col.back()] != -1) {
        add_column(col, reduced[pivot_owner[col.back()]], scratch);
      }
      if (col.empty()) continue;
      const int low = col.back();
      pivot_owner[low] = j;
      cleared[low] = 1;
      ++negatives[q];
      const double birth = simplices[low].diameter;
      const double death = simplices[j].diameter;
      if (q - 1 <= params.max_homology_dim && death > birth) {
        out.features.push_back({Vector2d(birth, death - birth), q - 1});
      }
      reduced[j] = std::move(col);
    }
  }

  for (int p = 0; p <= params.max_homology_dim; ++p) {
    const std::size_t positives = by_dim[p].size() - negatives[p];
    out.dropped_essential += positives - negatives[p + 1];
  }
  return out;
}

PointCloud parse_point_cloud_csv(const std::string& text, bool skip_header) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool skipped = !skip_header;
  while (std::getline(in, raw)) {
    ++line;
    const auto row = trim(raw);
    if (row.empty() || row.front() == '#') continue;
    if (!skipped) {
      skipped = true;
      continue;
    }
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      const auto comma = row.find(',', start);
      values.push_back(parse_double(row.substr(start, comma == row.npos ? row.npos : comma - start), line));
      if (comma == row.npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ParseError("point has " + std::to_string(values.size()) + " coordinates, expected " +
                           std::to_string(rows.front().size()),
                       line);
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw ParseError("non-finite coordinate", line);
    }
    rows.push_back(std::move(values));
  }
  const Eigen::Index d = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  PointCloud cloud(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) cloud(static_cast<Eigen::Index>(i), k) = rows[i][k];
  }
  return cloud;
}

PointCloud read_point_cloud(const std::filesystem::path& path, bool skip_header) {
  return parse_point_cloud_csv(read_text_file(path), skip_header);
}

std::string format_point_cloud_csv(const PointCloud& cloud) {
  std::string out;
  for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
    for (Eigen::Index k = 0; k < cloud.cols(); ++k) {
      if (k) out += ',';
      out += format_double(cloud(i, k));
    }
    out += '\n';
  }
  return out;
}

void write_point_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  write_file_atomic(path, format_point_cloud_csv(cloud));
}

}  // namespace pdbayes

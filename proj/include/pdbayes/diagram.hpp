#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pdbayes/types.hpp"

namespace pdbayes {

// Coordinate frame of a diagram. Birth-death points live on the wedge
// {d >= b >= 0}; tilted points (b, d - b) live on the closed first quadrant.
enum class Frame { BirthDeath, Tilted };

struct PersistenceFeature {
  Vector2d point;  // (birth, death) or (birth, persistence) depending on the frame
  int dim = 0;

  double birth() const { return point(0); }

  friend bool operator==(const PersistenceFeature& a, const PersistenceFeature& b) {
    return a.dim == b.dim && a.point(0) == b.point(0) && a.point(1) == b.point(1);
  }
};

// Finite multiset of features. Order carries no meaning; use `canonical()`
// or `same_multiset` for comparisons.
struct PersistenceDiagram {
  Frame frame = Frame::Tilted;
  std::vector<PersistenceFeature> features;
  std::optional<std::string> label;
  // Essential (infinite-death) classes discarded at ingest.
  std::size_t dropped_essential = 0;

  std::size_t size() const { return features.size(); }
  bool empty() const { return features.empty(); }

  // Features of homology dimension k (the D^k restriction), frame preserved.
  PersistenceDiagram restrict_to(int k) const;

  // Points of the diagram as a vector of 2-vectors, in feature order.
  std::vector<Vector2d> points() const;

  // Copy sorted by (dim, first coordinate, second coordinate).
  PersistenceDiagram canonical() const;
};

bool same_multiset(const PersistenceDiagram& a, const PersistenceDiagram& b);

// (b, d, k) -> (b, d - b, k). Throws ValidationError if d < b, b < 0 or a
// coordinate is not finite.
PersistenceDiagram tilt(const PersistenceDiagram& birth_death);

// (b, p, k) -> (b, b + p, k).
PersistenceDiagram untilt(const PersistenceDiagram& tilted);

// Throws ValidationError unless every feature is inside the frame's domain
// and has homology dimension in {0, 1, 2}.
void validate(const PersistenceDiagram& diagram);

enum class DiagramFormat { Csv, Json };

// Picks the format from the extension (.json -> Json, anything else -> Csv).
DiagramFormat format_from_path(const std::filesystem::path& path);

// Files are always in birth-death coordinates. The returned diagram is in
// the birth-death frame; rows with infinite death are dropped and counted.
PersistenceDiagram parse_diagram_csv(const std::string& text);
PersistenceDiagram parse_diagram_json(const std::string& text);
PersistenceDiagram read_diagram(const std::filesystem::path& path);
PersistenceDiagram read_diagram(const std::filesystem::path& path, DiagramFormat format);

// Tilted diagrams are untilted before writing.
std::string format_diagram_csv(const PersistenceDiagram& diagram);
std::string format_diagram_json(const PersistenceDiagram& diagram);
void write_diagram(const PersistenceDiagram& diagram, const std::filesystem::path& path);
void write_diagram(const PersistenceDiagram& diagram, const std::filesystem::path& path,
                   DiagramFormat format);

// Reads a diagram file, keeps homology dimension k and tilts it.
PersistenceDiagram load_tilted(const std::filesystem::path& path, int k);

}  // namespace pdbayes

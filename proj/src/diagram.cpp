#include "pdbayes/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pdbayes/error.hpp"
#include "pdbayes/format.hpp"
#include "pdbayes/intensity_io.hpp"

namespace pdbayes {

namespace {

bool feature_less(const PersistenceFeature& a, const PersistenceFeature& b) {
  if (a.dim != b.dim) return a.dim < b.dim;
  if (a.point(0) != b.point(0)) return a.point(0) < b.point(0);
  return a.point(1) < b.point(1);
}

void check_dim(int dim, std::size_t line = 0) {
  if (dim < 0 || dim > 2) {
    throw ValidationError("homology dimension " + std::to_string(dim) +
                          " outside {0,1,2}" +
                          (line ? " (line " + std::to_string(line) + ")" : ""));
  }
}

// Appends one birth-death row, dropping essential classes.
void ingest(PersistenceDiagram& out, double birth, double death, long dim, std::size_t line) {
  check_dim(static_cast<int>(dim), line);
  if (!std::isfinite(birth)) throw ValidationError("non-finite birth at line " + std::to_string(line));
  if (birth < 0) throw ValidationError("negative birth at line " + std::to_string(line));
  if (std::isinf(death) && death > 0) {
    ++out.dropped_essential;
    return;
  }
  if (!std::isfinite(death)) throw ValidationError("non-finite death at line " + std::to_string(line));
  if (death < birth) throw ValidationError("death < birth at line " + std::to_string(line));
  out.features.push_back({Vector2d(birth, death), static_cast<int>(dim)});
}

}  // namespace

PersistenceDiagram PersistenceDiagram::restrict_to(int k) const {
  PersistenceDiagram out;
  out.frame = frame;
  out.label = label;
  for (const auto& f : features) {
    if (f.dim == k) out.features.push_back(f);
  }
  return out;
}

std::vector<Vector2d> PersistenceDiagram::points() const {
  std::vector<Vector2d> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.point);
  return out;
}

PersistenceDiagram PersistenceDiagram::canonical() const {
  PersistenceDiagram out = *this;
  std::sort(out.features.begin(), out.features.end(), feature_less);
  return out;
}

bool same_multiset(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  if (a.frame != b.frame || a.size() != b.size()) return false;
  return a.canonical().features == b.canonical().features;
}

void validate(const PersistenceDiagram& diagram) {
  for (const auto& f : diagram.features) {
    check_dim(f.dim);
    const double b = f.point(0);
    const double s = f.point(1);
    if (!std::isfinite(b) || !std::isfinite(s)) throw ValidationError("non-finite feature coordinate");
    if (b < 0) throw ValidationError("negative birth " + format_double(b));
    if (diagram.frame == Frame::BirthDeath && s < b) {
      throw ValidationError("death " + format_double(s) + " < birth " + format_double(b));
    }
    if (diagram.frame == Frame::Tilted && s < 0) {
      throw ValidationError("negative persistence " + format_double(s));
    }
  }
}

PersistenceDiagram tilt(const PersistenceDiagram& birth_death) {
  if (birth_death.frame != Frame::BirthDeath) throw DomainError("tilt expects a birth-death diagram");
  validate(birth_death);
  PersistenceDiagram out = birth_death;
  out.frame = Frame::Tilted;
  for (auto& f : out.features) f.point(1) = f.point(1) - f.point(0);
  return out;
}

PersistenceDiagram untilt(const PersistenceDiagram& tilted) {
  if (tilted.frame != Frame::Tilted) throw DomainError("untilt expects a tilted diagram");
  PersistenceDiagram out = tilted;
  out.frame = Frame::BirthDeath;
  for (auto& f : out.features) f.point(1) = f.point(0) + f.point(1);
  return out;
}

DiagramFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".json" ? DiagramFormat::Json : DiagramFormat::Csv;
}

PersistenceDiagram parse_diagram_csv(const std::string& text) {
  PersistenceDiagram out;
  out.frame = Frame::BirthDeath;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto row = trim(raw);
    if (row.empty() || row.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      std::string compact;
      for (char c : row) {
        if (c != ' ' && c != '\t') compact.push_back(static_cast<char>(std::tolower(c)));
      }
      if (compact == "birth,death,dim") continue;
      // No header: fall through and parse the row as data.
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = row.find(',', start);
      fields.push_back(row.substr(start, comma == std::string_view::npos ? row.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields 'birth,death,dim', got " + std::to_string(fields.size()), line);
    }
    const double birth = parse_double(fields[0], line);
    const double death = parse_double(fields[1], line);
    const long dim = parse_integer(fields[2], line);
    ingest(out, birth, death, dim, line);
  }
  return out;
}

PersistenceDiagram parse_diagram_json(const std::string& text) {
  const auto doc = parse_json_text(text);
  if (!doc.is_array()) throw ParseError("diagram JSON must be an array of records", 0);
  PersistenceDiagram out;
  out.frame = Frame::BirthDeath;
  std::size_t index = 0;
  for (const auto& rec : doc) {
    ++index;
    auto number = [&](const char* key) -> double {
      if (!rec.contains(key)) throw ParseError(std::string("record missing '") + key + "'", index);
      const auto& v = rec.at(key);
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) return parse_double(v.get<std::string>(), index);
      throw ParseError(std::string("field '") + key + "' is not a number", index);
    };
    if (!rec.is_object()) throw ParseError("diagram record is not an object", index);
    if (!rec.contains("dim") || !rec.at("dim").is_number_integer()) {
      throw ParseError("record missing integer 'dim'", index);
    }
    ingest(out, number("birth"), number("death"), rec.at("dim").get<long>(), index);
  }
  return out;
}

PersistenceDiagram read_diagram(const std::filesystem::path& path, DiagramFormat format) {
  const auto text = read_text_file(path);
  auto diagram = format == DiagramFormat::Json ? parse_diagram_json(text) : parse_diagram_csv(text);
  diagram.label = path.filename().string();
  return diagram;
}

PersistenceDiagram read_diagram(const std::filesystem::path& path) {
  return read_diagram(path, format_from_path(path));
}

std::string format_diagram_csv(const PersistenceDiagram& diagram) {
  const auto bd = diagram.frame == Frame::Tilted ? untilt(diagram) : diagram;
  std::string out = "birth,death,dim\n";
  for (const auto& f : bd.features) {
    out += format_double(f.point(0));
    out += ',';
    out += format_double(f.point(1));
    out += ',';
    out += std::to_string(f.dim);
    out += '\n';
  }
  return out;
}

std::string format_diagram_json(const PersistenceDiagram& diagram) {
  const auto bd = diagram.frame == Frame::Tilted ? untilt(diagram) : diagram;
  // Hand-written so numbers use the same shortest round-trip text as CSV.
  std::string out = "[";
  for (std::size_t i = 0; i < bd.features.size(); ++i) {
    const auto& f = bd.features[i];
    out += i ? ",\n " : "\n ";
    out += "{\"birth\": " + format_double(f.point(0)) + ", \"death\": " + format_double(f.point(1)) +
           ", \"dim\": " + std::to_string(f.dim) + "}";
  }
  out += bd.features.empty() ? "]\n" : "\n]\n";
  return out;
}

void write_diagram(const PersistenceDiagram& diagram, const std::filesystem::path& path,
                   DiagramFormat format) {
  validate(diagram);
  write_file_atomic(path, format == DiagramFormat::Json ? format_diagram_json(diagram)
                                                        : format_diagram_csv(diagram));
}

void write_diagram(const PersistenceDiagram& diagram, const std::filesystem::path& path) {
  write_diagram(diagram, path, format_from_path(path));
}

PersistenceDiagram load_tilted(const std::filesystem::path& path, int k) {
  return tilt(read_diagram(path).restrict_to(k));
}

}  // namespace pdbayes

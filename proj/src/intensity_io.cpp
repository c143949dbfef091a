#include "pdbayes/intensity_io.hpp"

#include "pdbayes/error.hpp"
#include "pdbayes/format.hpp"

namespace pdbayes {

nlohmann::json mixture_to_json(const Mixture& mixture) {
  auto out = nlohmann::json::array();
  for (const auto& c : mixture.components()) {
    out.push_back({{"weight", c.weight}, {"mean", {c.mean(0), c.mean(1)}}, {"variance", c.variance}});
  }
  return out;
}

Mixture mixture_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ValidationError("mixture must be a JSON array of components");
  std::vector<Component> components;
  std::size_t index = 0;
  for (const auto& rec : doc) {
    ++index;
    const auto where = "mixture component " + std::to_string(index);
    if (!rec.is_object()) throw ValidationError(where + " is not an object");
    for (const char* key : {"weight", "mean", "variance"}) {
      if (!rec.contains(key)) throw ValidationError(where + " missing '" + key + "'");
    }
    const auto& mean = rec.at("mean");
    if (!rec.at("weight").is_number() || !rec.at("variance").is_number() || !mean.is_array() ||
        mean.size() != 2 || !mean[0].is_number() || !mean[1].is_number()) {
      throw ValidationError(where + ": expected numeric weight, variance and 2-element mean");
    }
    Component c{rec.at("weight").get<double>(), Vector2d(mean[0].get<double>(), mean[1].get<double>()),
                rec.at("variance").get<double>()};
    try {
      c.validate();
    } catch (const DomainError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    components.push_back(c);
  }
  return Mixture(std::move(components));
}

nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Recover line/column from the byte offset for the message.
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string reason = e.what();
    if (const auto at = reason.find(", column "); at != std::string::npos) {
      if (const auto colon = reason.find(": ", at); colon != std::string::npos) reason = reason.substr(colon + 2);
    }
    throw ParseError((source.empty() ? std::string() : source + ": ") + "invalid JSON at line " +
                         std::to_string(line) + ", column " + std::to_string(column) + ": " + reason,
                     0);
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  return parse_json_text(read_text_file(path), path.string());
}

Mixture read_mixture(const std::filesystem::path& path) { return mixture_from_json(read_json_file(path)); }

}  // namespace pdbayes

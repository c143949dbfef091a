#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pdbayes/intensity.hpp"

namespace pdbayes {

// JSON form: [{"weight": c, "mean": [b, p], "variance": s}, ...]
nlohmann::json mixture_to_json(const Mixture& mixture);
Mixture mixture_from_json(const nlohmann::json& doc);

// Parses JSON text; syntax errors are reported with line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& source = "");
nlohmann::json read_json_file(const std::filesystem::path& path);

Mixture read_mixture(const std::filesystem::path& path);

}  // namespace pdbayes

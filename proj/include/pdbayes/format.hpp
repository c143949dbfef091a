#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace pdbayes {

// Shortest decimal text that parses back to the same binary64 value.
std::string format_double(double value);

// Strict decimal parse of the whole (trimmed) field; throws ParseError.
double parse_double(std::string_view text, std::size_t line = 0);
long parse_integer(std::string_view text, std::size_t line = 0);

std::string_view trim(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace pdbayes

#include "pdbayes/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pdbayes/error.hpp"

namespace pdbayes {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw NumericalError("cannot format double");
  return std::string(buf.data(), end);
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::size_t line) {
  text = trim(text);
  if (text.empty()) throw ParseError("empty numeric field", line);
  if (text.front() == '+') text.remove_prefix(1);
  const std::string_view lowered = text;
  if (lowered == "inf" || lowered == "Inf" || lowered == "infinity" || lowered == "Infinity")
    return std::numeric_limits<double>::infinity();
  if (lowered == "-inf" || lowered == "-Inf" || lowered == "-infinity" || lowered == "-Infinity")
    return -std::numeric_limits<double>::infinity();
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("not a number: '" + std::string(text) + "'", line);
  }
  return value;
}

long parse_integer(std::string_view text, std::size_t line) {
  text = trim(text);
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("not an integer: '" + std::string(text) + "'", line);
  }
  return value;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out.flush()) throw ValidationError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ValidationError("cannot rename to '" + path.string() + "': " + ec.message());
}

}  // namespace pdbayes

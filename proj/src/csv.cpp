#include "suffbench/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <stdexcept>

namespace suffbench::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape(row[i]);
  }
  out.push_back('\n');
  return out;
}

ParseResult parse(std::string_view data) {
  ParseResult result;
  Row row;
  std::string field;
  bool quoted = false;       // inside a quoted field
  bool was_quoted = false;   // current field started with a quote
  std::size_t i = 0;
  while (i < data.size()) {
    char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || was_quoted) {
          throw std::runtime_error("csv: stray quote at byte " + std::to_string(i));
        }
        quoted = was_quoted = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        break;
      case '\n':
        if (!was_quoted && !field.empty() && field.back() == '\r') field.pop_back();
        row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        result.rows.push_back(std::move(row));
        row.clear();
        result.valid_bytes = i + 1;
        break;
      default:
        if (was_quoted && c != '\r') {
          throw std::runtime_error("csv: text after closing quote at byte " + std::to_string(i));
        }
        field.push_back(c);
    }
    ++i;
  }
  result.partial_tail = result.valid_bytes < data.size();
  return result;
}

std::string format_double(double v) { return fmt::format("{}", v); }

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("csv: not a number: '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("csv: not an integer: '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::runtime_error("csv: not a boolean: '" + std::string(s) + "'");
}

}  // namespace suffbench::csv

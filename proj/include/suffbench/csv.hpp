#pragma once

// RFC 4180 CSV with LF record terminators. Fields are quoted only when they
// contain a comma, quote, CR or LF.

#include <string>
#include <string_view>
#include <vector>

namespace suffbench::csv {

using Row = std::vector<std::string>;

std::string escape(std::string_view field);

/// One record including its trailing '\n'.
std::string format_row(const Row& row);

struct ParseResult {
  std::vector<Row> rows;
  // Bytes covered by complete records; anything past this is a partial tail.
  std::size_t valid_bytes = 0;
  bool partial_tail = false;
};

/// Parses complete records. A trailing record without its '\n' terminator
/// (e.g. a write cut short) is reported as a partial tail and not returned.
/// Throws std::runtime_error on malformed quoting inside a complete record.
ParseResult parse(std::string_view data);

std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);
bool parse_bool(std::string_view s);

}  // namespace suffbench::csv

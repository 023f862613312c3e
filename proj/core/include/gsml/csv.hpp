#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gsml::csv {

/// Splits on `sep` without quoting rules; fields are trimmed of ASCII spaces.
std::vector<std::string_view> split(std::string_view line, char sep = ',');

double parse_double(std::string_view field);
std::int64_t parse_int(std::string_view field);
std::size_t parse_index(std::string_view field);

/// Shortest round-trip decimal form, "." separator regardless of locale.
std::string format_double(double value);

/// Reads a line, dropping a trailing '\r'. Returns false at end of input.
bool read_line(std::istream& in, std::string& line);

}  // namespace gsml::csv

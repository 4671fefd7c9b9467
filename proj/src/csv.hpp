#pragma once

// Minimal RFC-4180-style reader/writer helpers shared by the file formats.

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace itn::csv {

/// Splits one line; quoted fields may contain the delimiter and "" escapes.
/// Returns std::nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split(const std::string& line, char delimiter = ',');

/// Next non-blank line with any trailing '\r' removed; false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no);

std::string trim(const std::string& s);

/// Strict double parse of the whole field (surrounding blanks allowed).
std::optional<double> to_double(const std::string& field);
std::optional<long long> to_integer(const std::string& field);

/// Quotes a field when it contains a delimiter, quote or newline.
std::string escape(const std::string& field);

/// Shortest round-trippable decimal form.
std::string format_double(double value);

}  // namespace itn::csv

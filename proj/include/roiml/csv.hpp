#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace roiml::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
/// line breaks. Accepts LF or CRLF and strips a leading UTF-8 BOM. Blank lines
/// are skipped. Throws Error(Parse) with the line number on an unterminated
/// quote or stray characters after a closing quote.
std::vector<Row> parse(std::string_view text, std::string_view module = "csv");

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Joins fields into one record terminated by LF.
std::string format_row(const std::vector<std::string>& fields);

/// Fixed six-decimal rendering with negative zero folded to zero.
std::string format_decimal(double value);

/// Index of `name` in a header row, or npos.
std::size_t column_index(const Row& header, std::string_view name);

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

}  // namespace roiml::csv

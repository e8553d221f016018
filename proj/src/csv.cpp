#include "roiml/csv.hpp"

#include <cmath>
#include <cstdio>

#include "roiml/error.hpp"

namespace roiml::csv {

std::vector<Row> parse(std::string_view text, std::string_view module) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }

  std::vector<Row> rows;
  Row row;
  std::string field;
  std::size_t line = 1;
  std::size_t pos = 0;
  bool row_has_content = false;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (row_has_content) rows.push_back(std::move(row));
    row = Row{};
    row_has_content = false;
  };

  row.line = line;
  while (pos < text.size()) {
    char c = text[pos];
    if (c == '"' && field.empty()) {
      // Quoted field.
      const std::size_t open_line = line;
      ++pos;
      row_has_content = true;
      bool closed = false;
      while (pos < text.size()) {
        char q = text[pos];
        if (q == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
            continue;
          }
          ++pos;
          closed = true;
          break;
        }
        if (q == '\n') ++line;
        field.push_back(q);
        ++pos;
      }
      if (!closed) {
        throw Error(ErrorCode::Parse, std::string(module),
                    "unterminated quoted field starting at line " + std::to_string(open_line));
      }
      if (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
        throw Error(ErrorCode::Parse, std::string(module),
                    "unexpected character after closing quote at line " + std::to_string(line));
      }
      continue;
    }
    if (c == ',') {
      end_field();
      row_has_content = true;
      ++pos;
      continue;
    }
    if (c == '\r' || c == '\n') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      end_row();
      ++line;
      row.line = line;
      continue;
    }
    if (c == '"') {
      throw Error(ErrorCode::Parse, std::string(module),
                  "stray quote inside unquoted field at line " + std::to_string(line));
    }
    field.push_back(c);
    row_has_content = true;
    ++pos;
  }
  if (row_has_content || !field.empty()) end_row();
  return rows;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::size_t column_index(const Row& header, std::string_view name) {
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    if (header.fields[i] == name) return i;
  }
  return npos;
}

}  // namespace roiml::csv

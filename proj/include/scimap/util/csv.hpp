#pragma once

// Minimal RFC 4180 reader/writer: quoted fields, doubled quotes, CRLF tolerant.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scimap/error.hpp"

namespace scimap::csv {

using Row = std::vector<std::string>;

/// Reads one logical record. Returns nullopt at end of stream.
inline std::optional<Row> read_row(std::istream& in) {
  Row row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      row.push_back(std::move(field));
      return row;
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      row.push_back(std::move(field));
      return row;
    } else {
      field.push_back(ch);
    }
  }
  if (in_quotes) throw Error(ErrorKind::ParseError, "unterminated quoted field");
  if (!any) return std::nullopt;
  row.push_back(std::move(field));
  return row;
}

/// Header-indexed reader. Column lookup is by name.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {
    auto header = read_row(in_);
    if (!header) throw Error(ErrorKind::ParseError, "missing CSV header");
    for (std::size_t i = 0; i < header->size(); ++i) {
      std::string name = (*header)[i];
      if (i == 0 && name.size() >= 3 && name.compare(0, 3, "\xEF\xBB\xBF") == 0) name.erase(0, 3);
      index_[name] = i;
    }
    width_ = header->size();
  }

  bool has(std::string_view column) const { return index_.contains(std::string(column)); }

  std::size_t column(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw Error(ErrorKind::ParseError, "missing column '" + std::string(name) + "'");
    return it->second;
  }

  /// Next non-blank row; line_number() refers to it afterwards.
  std::optional<Row> next() {
    while (auto row = read_row(in_)) {
      ++line_;
      if (row->size() == 1 && (*row)[0].empty()) continue;
      return row;
    }
    return std::nullopt;
  }

  std::size_t line_number() const { return line_ + 1; }
  std::size_t width() const { return width_; }

 private:
  std::istream& in_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t width_ = 0;
  std::size_t line_ = 0;
};

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) pos = s.size();
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace scimap::csv

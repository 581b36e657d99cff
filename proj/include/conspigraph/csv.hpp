#pragma once

#include <cstdint>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "conspigraph/common.hpp"

namespace conspigraph::csv {

/// RFC 4180 writer. Fields are quoted only when they contain a separator,
/// quote, or line break. Rows end with '\n'.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void row(std::initializer_list<std::string_view> fields);
  void row(const std::vector<std::string>& fields);

  // Incremental form: field(...) repeatedly, then end_row().
  Writer& field(std::string_view value);
  Writer& field(std::int64_t value);
  Writer& field(double value, int precision);
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

std::string format_fixed(double value, int precision);

/// Streaming RFC 4180 reader; quoted fields may span lines.
class Reader {
 public:
  explicit Reader(std::istream& in, std::string source = "<csv>") : in_(in), source_(std::move(source)) {}

  /// Reads the next row; false at end of input.
  bool next(std::vector<std::string>& row);
  /// 1-based line number where the last returned row started.
  std::size_t line() const { return row_line_; }
  std::string locator() const { return source_ + ":" + std::to_string(row_line_); }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
  std::size_t row_line_ = 0;
};

/// Header-indexed table read fully into memory.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // source line per row

  /// Index of a column; throws ParseError naming `source` if absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  std::string source;
};

Table read_table(const fs::path& path);
Table read_table(std::istream& in, std::string source);

}  // namespace conspigraph::csv

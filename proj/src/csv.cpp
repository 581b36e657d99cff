#include "conspigraph/csv.hpp"

#include <cstdio>
#include <fstream>

namespace conspigraph::csv {

namespace {

bool needs_quotes(std::string_view v) {
  return v.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view v) {
  if (!needs_quotes(v)) {
    out << v;
    return;
  }
  out << '"';
  for (char c : v) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

std::string format_fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, value);
  std::string s = buf;
  if (s.rfind("-0", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void Writer::row(std::initializer_list<std::string_view> fields) {
  for (auto f : fields) field(f);
  end_row();
}

void Writer::row(const std::vector<std::string>& fields) {
  for (const auto& f : fields) field(f);
  end_row();
}

Writer& Writer::field(std::string_view value) {
  if (!first_) out_ << ',';
  write_field(out_, value);
  first_ = false;
  return *this;
}

Writer& Writer::field(std::int64_t value) { return field(std::to_string(value)); }

Writer& Writer::field(double value, int precision) { return field(format_fixed(value, precision)); }

void Writer::end_row() {
  out_ << '\n';
  first_ = true;
}

bool Reader::next(std::vector<std::string>& row) {
  row.clear();
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_;
  row_line_ = line_;

  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i >= line.size()) {
      if (in_quotes) {
        // Quoted field continues on the next physical line.
        std::string more;
        if (!std::getline(in_, more)) throw ParseError(locator() + ": unterminated quoted field");
        ++line_;
        field.push_back('\n');
        line = std::move(more);
        i = 0;
        continue;
      }
      break;
    }
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\r' && i + 1 == line.size()) {
      // CRLF line ending
    } else {
      field.push_back(c);
    }
    ++i;
  }
  row.push_back(std::move(field));
  return true;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ParseError(source + ": missing column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

Table read_table(std::istream& in, std::string source) {
  Table t;
  t.source = source;
  Reader reader(in, std::move(source));
  std::vector<std::string> row;
  if (!reader.next(row)) return t;
  if (!row.empty() && row[0].rfind("\xEF\xBB\xBF", 0) == 0) row[0].erase(0, 3);
  t.header = row;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != t.header.size())
      throw ParseError(reader.locator() + ": expected " + std::to_string(t.header.size()) + " fields, got " +
                       std::to_string(row.size()));
    t.rows.push_back(row);
    t.lines.push_back(reader.line());
  }
  return t;
}

Table read_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_table(in, path.string());
}

}  // namespace conspigraph::csv

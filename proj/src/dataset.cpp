#include "topoproj/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "csv_detail.hpp"

namespace topoproj {

Index Dataset::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return -1;
  return static_cast<Index>(it - columns.begin());
}

Dataset Dataset::select_columns(const std::vector<std::string>& names) const {
  Dataset out;
  out.columns = names;
  out.values.resize(rows(), static_cast<Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const Index src = column_index(names[j]);
    if (src < 0) throw std::invalid_argument("select_columns: unknown column '" + names[j] + "'");
    out.values.col(static_cast<Index>(j)) = values.col(src);
  }
  return out;
}

Dataset Dataset::drop_columns(const std::vector<std::string>& names) const {
  std::vector<std::string> keep;
  for (const auto& col : columns) {
    if (std::find(names.begin(), names.end(), col) == names.end()) keep.push_back(col);
  }
  return select_columns(keep);
}

Dataset Dataset::select_rows(const std::vector<Index>& row_ids) const {
  Dataset out;
  out.columns = columns;
  out.values.resize(static_cast<Index>(row_ids.size()), cols());
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    const Index r = row_ids[i];
    if (r < 0 || r >= rows()) throw std::out_of_range("select_rows: row index out of range");
    out.values.row(static_cast<Index>(i)) = values.row(r);
  }
  return out;
}

namespace detail {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<CsvRow> parse_csv_rows(const std::string& content, const std::string& path) {
  std::vector<CsvRow> out;
  CsvRow row;
  std::string field;
  std::size_t line = 1;
  std::size_t field_line = 1;
  bool in_quotes = false;
  bool row_started = false;

  const auto push_field = [&]() {
    row.push_back(CsvField{field, field_line, row.size() + 1});
    field.clear();
  };
  const auto push_row = [&]() {
    push_field();
    out.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (!row_started) {
      row_started = true;
      field_line = line;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        break;
      case ',':
        push_field();
        field_line = line;
        break;
      case '\r':
        break;  // swallow; the matching \n ends the row
      case '\n':
        push_row();
        ++line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes)
    throw std::runtime_error(path + ": unterminated quoted field starting at line " +
                             std::to_string(field_line));
  if (row_started || !field.empty()) push_row();  // final row without trailing newline
  return out;
}

Scalar parse_csv_number(const CsvField& f, const std::string& path) {
  // Tolerate surrounding blanks, which quoted numeric exports sometimes carry.
  std::size_t b = 0, e = f.text.size();
  while (b < e && (f.text[b] == ' ' || f.text[b] == '\t')) ++b;
  while (e > b && (f.text[e - 1] == ' ' || f.text[e - 1] == '\t')) --e;
  Scalar value = 0;
  const char* first = f.text.data() + b;
  const char* last = f.text.data() + e;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::runtime_error(path + ": line " + std::to_string(f.line) + ", column " +
                             std::to_string(f.column) + ": cannot parse '" + f.text +
                             "' as a number");
  return value;
}

}  // namespace detail

Dataset load_csv(const std::string& path) {
  const std::vector<detail::CsvRow> rows = detail::parse_csv_rows(detail::read_text_file(path), path);
  if (rows.empty()) throw std::runtime_error(path + ": empty file, expected a header row");

  Dataset data;
  for (const detail::CsvField& f : rows[0]) data.columns.push_back(f.text);
  const std::size_t width = data.columns.size();

  data.values.resize(static_cast<Index>(rows.size()) - 1, static_cast<Index>(width));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width)
      throw std::runtime_error(path + ": line " + std::to_string(rows[r].front().line) +
                               ": expected " + std::to_string(width) + " fields, got " +
                               std::to_string(rows[r].size()));
    for (std::size_t c = 0; c < width; ++c)
      data.values(static_cast<Index>(r) - 1, static_cast<Index>(c)) =
          detail::parse_csv_number(rows[r][c], path);
  }
  return data;
}

namespace {

// Quote cells only when they contain CSV metacharacters.
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void save_csv(const Dataset& data, const std::string& path) {
  if (static_cast<Index>(data.columns.size()) != data.cols())
    throw std::invalid_argument("save_csv: column name count does not match value width");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (std::size_t j = 0; j < data.columns.size(); ++j) {
    if (j) out << ',';
    out << csv_escape(data.columns[j]);
  }
  out << '\n';
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < data.cols(); ++c) {
      if (c) out << ',';
      out << format_scalar(data.values(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string format_scalar(Scalar v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace topoproj

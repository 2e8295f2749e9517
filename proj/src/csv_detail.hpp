#pragma once

// Raw comma-separated parsing shared by the dataset loaders. Fields keep
// their source line and 1-based column so loaders can point at bad cells.

#include <charconv>
#include <string>
#include <vector>

#include "topoproj/types.hpp"

namespace topoproj::detail {

struct CsvField {
  std::string text;
  std::size_t line;    // 1-based line where the field starts
  std::size_t column;  // 1-based field position within its row
};

using CsvRow = std::vector<CsvField>;

std::vector<CsvRow> parse_csv_rows(const std::string& content, const std::string& path);

Scalar parse_csv_number(const CsvField& field, const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace topoproj::detail

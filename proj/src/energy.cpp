#include "topoproj/energy.hpp"

#include <stdexcept>

#include "csv_detail.hpp"

namespace topoproj {

const std::vector<std::string>& energy_feature_columns() {
  static const std::vector<std::string> kColumns = {
      "lights", "T1",  "RH_1", "T2",  "RH_2", "T3",  "RH_3",        "T4",
      "RH_4",   "T5",  "RH_5", "T6",  "RH_6", "T7",  "RH_7",        "T8",
      "RH_8",   "T9",  "RH_9", "T_out", "Press_mm_hg", "RH_out",    "Windspeed",
      "Visibility", "Tdewpoint", "rv1", "rv2"};
  return kColumns;
}

Dataset load_energy_dataset(const std::string& path) {
  const std::vector<detail::CsvRow> rows = detail::parse_csv_rows(detail::read_text_file(path), path);
  if (rows.empty()) throw std::runtime_error(path + ": empty file, expected a header row");

  // Header: a timestamp column (skipped), the target, and the 27 inputs.
  std::vector<std::string> header;
  for (const detail::CsvField& f : rows[0]) header.push_back(f.text);

  std::vector<std::size_t> keep;  // source field positions to retain
  std::vector<std::string> columns;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "date") continue;
    keep.push_back(j);
    columns.push_back(header[j]);
  }

  bool has_target = false;
  for (const auto& c : columns) has_target = has_target || c == kEnergyTargetColumn;
  if (!has_target)
    throw std::runtime_error(path + ": missing required '" + std::string(kEnergyTargetColumn) +
                             "' column");
  const auto& expected = energy_feature_columns();
  std::size_t n_features = 0;
  for (const auto& c : columns)
    if (c != kEnergyTargetColumn) ++n_features;
  if (n_features != expected.size())
    throw std::runtime_error(path + ": expected " + std::to_string(expected.size()) +
                             " input columns besides '" + std::string(kEnergyTargetColumn) +
                             "', got " + std::to_string(n_features));
  for (const auto& name : expected) {
    bool found = false;
    for (const auto& c : columns) found = found || c == name;
    if (!found) throw std::runtime_error(path + ": missing expected input column '" + name + "'");
  }

  if (rows.size() == 1) throw std::runtime_error(path + ": no data rows after the header");

  Dataset data;
  data.columns = columns;
  data.values.resize(static_cast<Index>(rows.size()) - 1, static_cast<Index>(columns.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw std::runtime_error(path + ": line " + std::to_string(rows[r].front().line) +
                               ": expected " + std::to_string(header.size()) + " fields, got " +
                               std::to_string(rows[r].size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      data.values(static_cast<Index>(r) - 1, static_cast<Index>(j)) =
          detail::parse_csv_number(rows[r][keep[j]], path);
  }
  return data;
}

}  // namespace topoproj

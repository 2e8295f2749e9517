#pragma once

#include <string>
#include <vector>

#include "topoproj/types.hpp"

namespace topoproj {

/// Named-column numeric table. Rows are samples.
struct Dataset {
  std::vector<std::string> columns;
  Matrix values;  // rows() x columns.size()

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  // Position of `name`, or -1 when absent.
  Index column_index(const std::string& name) const;

  // Column subset in the requested order; throws on unknown names.
  Dataset select_columns(const std::vector<std::string>& names) const;

  // Everything except the named columns (missing names are ignored).
  Dataset drop_columns(const std::vector<std::string>& names) const;

  Dataset select_rows(const std::vector<Index>& row_ids) const;
};

/// Parses a comma-separated file with a header row. Quoted fields may contain
/// commas, doubled quotes, and newlines; CR/LF endings are accepted. Every
/// data field must parse as a number; failures report line and column.
Dataset load_csv(const std::string& path);

void save_csv(const Dataset& data, const std::string& path);

/// Shortest decimal form that parses back to the identical double, so CSV
/// output is byte-stable across reruns.
std::string format_scalar(Scalar v);

}  // namespace topoproj

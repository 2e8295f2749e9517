#pragma once

#include <string>
#include <vector>

#include "topoproj/dataset.hpp"

namespace topoproj {

/// The appliance-energy CSV: drops the timestamp column, keeps the
/// "Appliances" target plus exactly the 27 numeric input columns, and
/// reports malformed fields with their line and column.
Dataset load_energy_dataset(const std::string& path);

/// Feature column names expected in the file, in file order.
const std::vector<std::string>& energy_feature_columns();

inline constexpr const char* kEnergyTargetColumn = "Appliances";

}  // namespace topoproj

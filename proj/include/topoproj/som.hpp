#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "topoproj/types.hpp"

namespace topoproj {

/// Square-grid map training knobs. radius_start <= 0 means "use the
/// conventional default max(rows, cols) / 2".
struct SomConfig {
  Index rows = 10;
  Index cols = 10;
  Scalar lr_start = 0.5;
  Scalar lr_end = 0.05;
  Scalar radius_start = 0.0;
  Scalar radius_end = 1.0;
  Index iterations = 20000;  // single-sample presentations
  std::uint64_t seed = 0;

  Scalar effective_radius_start() const;
  void validate() const;  // throws std::invalid_argument
};

/// Trained map: one codebook row per grid unit, unit index = row * cols + col.
struct Som {
  SomConfig config;
  Index dim = 0;
  Matrix codebook;  // (rows * cols) x dim

  Index n_units() const { return config.rows * config.cols; }
  Index unit_row(Index unit) const { return unit / config.cols; }
  Index unit_col(Index unit) const { return unit % config.cols; }
  Index unit_at(Index row, Index col) const { return row * config.cols + col; }
};

/// Sequential training: each iteration presents one uniformly drawn sample,
/// finds its best-matching unit, and moves every unit toward the sample with
/// a Gaussian gain over grid distance. Learning rate and radius decay
/// linearly from start to end. Codebook is initialized uniformly within each
/// feature's observed range. Pure function of (x, config).
Som train_som(const Eigen::Ref<const Matrix>& x, const SomConfig& config);

/// Index of the codebook row nearest to x (Euclidean); ties break to the
/// lowest unit index.
Index bmu(const Som& som, const Eigen::Ref<const RowVector>& x);

/// BMU of every row of x.
std::vector<Index> bmu_rows(const Som& som, const Eigen::Ref<const Matrix>& x);

/// Mean distance from samples to their BMUs.
Scalar quantization_error(const Som& som, const Eigen::Ref<const Matrix>& x);

/// Versioned little-endian binary round trip for a trained map. The stream
/// forms exist so a map can be embedded inside a larger model file.
void save_som(const Som& som, const std::string& path);
Som load_som(const std::string& path);
void write_som(std::ostream& out, const Som& som);
Som read_som(std::istream& in);

}  // namespace topoproj

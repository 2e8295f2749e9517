#include "topoproj/umatrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

#include "topoproj/dataset.hpp"

namespace topoproj {

Scalar UMatrix::edge_weight(Index u, Index v) const {
  const Index ur = u / cols, uc = u % cols;
  const Index vr = v / cols, vc = v % cols;
  if (ur == vr && std::abs(uc - vc) == 1) return horizontal(ur, std::min(uc, vc));
  if (uc == vc && std::abs(ur - vr) == 1) return vertical(std::min(ur, vr), uc);
  throw std::invalid_argument("edge_weight: units " + std::to_string(u) + " and " +
                              std::to_string(v) + " are not grid-adjacent");
}

UMatrix build_umatrix(const Som& som) {
  const Index rows = som.config.rows, cols = som.config.cols;
  if (rows < 2 || cols < 2) throw std::invalid_argument("build_umatrix: need rows >= 2 and cols >= 2");
  if (som.codebook.rows() != rows * cols)
    throw std::invalid_argument("build_umatrix: codebook does not match the configured grid");

  UMatrix um;
  um.rows = rows;
  um.cols = cols;
  um.horizontal.resize(rows, cols - 1);
  um.vertical.resize(rows - 1, cols);

  const auto unit = [cols](Index r, Index c) { return r * cols + c; };
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c + 1 < cols; ++c)
      um.horizontal(r, c) = (som.codebook.row(unit(r, c)) - som.codebook.row(unit(r, c + 1))).norm();
  for (Index r = 0; r + 1 < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      um.vertical(r, c) = (som.codebook.row(unit(r, c)) - som.codebook.row(unit(r + 1, c))).norm();

  // Doubled grid: units at even/even, edges between them, and interstitial
  // even/odd cells filled with local means so the picture is gap-free.
  um.expanded.setZero(2 * rows - 1, 2 * cols - 1);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c + 1 < cols; ++c) um.expanded(2 * r, 2 * c + 1) = um.horizontal(r, c);
  for (Index r = 0; r + 1 < rows; ++r)
    for (Index c = 0; c < cols; ++c) um.expanded(2 * r + 1, 2 * c) = um.vertical(r, c);

  // Unit cells: mean of the 2-4 incident edge weights.
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      Scalar sum = 0.0;
      int count = 0;
      if (c > 0) { sum += um.horizontal(r, c - 1); ++count; }
      if (c + 1 < cols) { sum += um.horizontal(r, c); ++count; }
      if (r > 0) { sum += um.vertical(r - 1, c); ++count; }
      if (r + 1 < rows) { sum += um.vertical(r, c); ++count; }
      um.expanded(2 * r, 2 * c) = sum / static_cast<Scalar>(count);
    }

  // Diagonal interstitials (odd/odd): mean of the 4 surrounding edge cells.
  for (Index r = 0; r + 1 < rows; ++r)
    for (Index c = 0; c + 1 < cols; ++c)
      um.expanded(2 * r + 1, 2 * c + 1) =
          (um.horizontal(r, c) + um.horizontal(r + 1, c) + um.vertical(r, c) + um.vertical(r, c + 1)) /
          4.0;
  return um;
}

namespace {

// Non-negative-weight single-source shortest paths on the grid graph.
void dijkstra_from(const UMatrix& um, Index source, Vector& dist) {
  const Index n = um.n_units();
  const Index cols = um.cols;
  dist.setConstant(n, std::numeric_limits<Scalar>::infinity());
  dist(source) = 0.0;

  using Entry = std::pair<Scalar, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  queue.emplace(0.0, source);

  Index neighbors[4];
  Scalar weights[4];
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist(u)) continue;  // stale entry

    const Index r = u / cols, c = u % cols;
    int count = 0;
    if (c > 0) { neighbors[count] = u - 1; weights[count++] = um.horizontal(r, c - 1); }
    if (c + 1 < cols) { neighbors[count] = u + 1; weights[count++] = um.horizontal(r, c); }
    if (r > 0) { neighbors[count] = u - cols; weights[count++] = um.vertical(r - 1, c); }
    if (r + 1 < um.rows) { neighbors[count] = u + cols; weights[count++] = um.vertical(r, c); }

    for (int i = 0; i < count; ++i) {
      assert(weights[i] >= 0.0);
      const Scalar candidate = d + weights[i];
      if (candidate < dist(neighbors[i])) {
        dist(neighbors[i]) = candidate;
        queue.emplace(candidate, neighbors[i]);
      }
    }
  }
}

}  // namespace

GeodesicTable all_pairs_geodesic(const UMatrix& um) {
  if (um.rows < 2 || um.cols < 2) throw std::invalid_argument("all_pairs_geodesic: malformed U-matrix");
  if ((um.horizontal.array() < 0.0).any() || (um.vertical.array() < 0.0).any())
    throw std::invalid_argument("all_pairs_geodesic: negative edge weight");

  GeodesicTable geo;
  geo.n_units = um.n_units();
  geo.rows = um.rows;
  geo.cols = um.cols;
  geo.dist.resize(geo.n_units, geo.n_units);

  // Fill the upper triangle from per-source runs and mirror it, so the table
  // is symmetric to the last bit regardless of summation order along paths.
  Vector dist;
  for (Index s = 0; s < geo.n_units; ++s) {
    dijkstra_from(um, s, dist);
    for (Index v = s; v < geo.n_units; ++v) {
      geo.dist(s, v) = dist(v);
      geo.dist(v, s) = dist(v);
    }
  }
  return geo;
}

void save_geodesic_csv(const GeodesicTable& geo, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "unit";
  for (Index v = 0; v < geo.n_units; ++v) out << ",u" << v;
  out << '\n';
  for (Index u = 0; u < geo.n_units; ++u) {
    out << u;
    for (Index v = 0; v < geo.n_units; ++v) out << ',' << format_scalar(geo.dist(u, v));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace topoproj

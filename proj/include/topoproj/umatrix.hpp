#pragma once

#include <string>
#include <vector>

#include "topoproj/som.hpp"
#include "topoproj/types.hpp"

namespace topoproj {

/// Distances between 4-adjacent codebook vectors, plus the doubled grid used
/// for rendering. Edges are stored by orientation: horizontal(r, c) joins
/// units (r, c)-(r, c+1); vertical(r, c) joins (r, c)-(r+1, c). That encodes
/// exactly the rows*(cols-1) + cols*(rows-1) grid edges.
struct UMatrix {
  Index rows = 0;
  Index cols = 0;
  Matrix horizontal;  // rows x (cols-1)
  Matrix vertical;    // (rows-1) x cols
  Matrix expanded;    // (2*rows-1) x (2*cols-1)

  Index n_units() const { return rows * cols; }
  Index n_edges() const { return rows * (cols - 1) + cols * (rows - 1); }

  // Weight of the edge between two 4-adjacent units; throws when the pair is
  // not adjacent.
  Scalar edge_weight(Index u, Index v) const;
};

UMatrix build_umatrix(const Som& som);

/// All-pairs shortest-path distances over the U-matrix edge graph, computed
/// by one Dijkstra run per source and cached so inference never recomputes.
struct GeodesicTable {
  Index n_units = 0;
  Matrix dist;  // n_units x n_units, symmetric, zero diagonal

  Index rows = 0;  // grid shape carried along for unit <-> (row, col) mapping
  Index cols = 0;
};

GeodesicTable all_pairs_geodesic(const UMatrix& um);

/// Debug export: one row per unit pair block, plain dense CSV.
void save_geodesic_csv(const GeodesicTable& geo, const std::string& path);

}  // namespace topoproj

#pragma once

#include <string>
#include <vector>

#include "topoproj/projection.hpp"
#include "topoproj/types.hpp"
#include "topoproj/umatrix.hpp"

namespace topoproj {

/// Binary PGM (P5) of the expanded U-matrix grid: darker pixels mean larger
/// distances, anchor units are drawn black. Also writes `<path>.anchors.csv`
/// with one row per anchor (sample id, unit, grid and image coordinates).
void render_umatrix_pgm(const UMatrix& um, const std::vector<Anchor>& anchors,
                        const std::string& path);

/// Same picture as scalable vector graphics, anchors as red dots labeled
/// with their sample ids.
void render_umatrix_svg(const UMatrix& um, const std::vector<Anchor>& anchors,
                        const std::string& path);

}  // namespace topoproj

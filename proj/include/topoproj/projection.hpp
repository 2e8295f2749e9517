#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoproj/preprocess.hpp"
#include "topoproj/som.hpp"
#include "topoproj/types.hpp"
#include "topoproj/umatrix.hpp"

namespace topoproj {

/// A labeled sample pinned to its best-matching unit. Targets stay in
/// original units throughout.
struct Anchor {
  Index sample_id = 0;
  Index unit = 0;
  RowVector y;
};

enum class ProjectionMethod { kWavg, kAvg, kRand, kLinear, kPoly };

std::string to_string(ProjectionMethod method);
ProjectionMethod parse_projection_method(const std::string& name);

struct ProjectionConfig {
  ProjectionMethod method = ProjectionMethod::kWavg;
  Index n_neighbors = 5;
  Index poly_degree = 2;
  std::uint64_t seed = 0;  // consumed by the random-pick estimator only

  void validate(Index n_anchors) const;  // throws std::invalid_argument
};

struct ScoredAnchor {
  Anchor anchor;
  Scalar distance = 0;
};

/// Thrown by the line-fit estimator when the neighbor distances cannot
/// support the requested degree; callers fall back to the plain average.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One anchor per labeled row; x_normalized must already be in the map's
/// input space.
std::vector<Anchor> map_labeled(const Som& som, const Eigen::Ref<const Matrix>& x_normalized,
                                const Eigen::Ref<const Matrix>& y);

/// The n anchors geodesically nearest to `unit`, ascending by distance, ties
/// by ascending sample_id.
std::vector<ScoredAnchor> nearest_anchors(const GeodesicTable& geo,
                                          const std::vector<Anchor>& anchors, Index unit, Index n);

/// Inverse-distance weighted mean per target. Zero-distance neighbors take
/// the formula's limit: the plain mean over the zero-distance anchors only.
RowVector estimate_wavg(const std::vector<ScoredAnchor>& neighbors);

/// Unweighted mean per target.
RowVector estimate_avg(const std::vector<ScoredAnchor>& neighbors);

/// Mean of n anchors drawn uniformly without replacement.
RowVector estimate_rand(const std::vector<Anchor>& anchors, Index n, std::uint64_t seed);

/// Least-squares fit of target against distance (independently per target),
/// evaluated at distance zero. degree 1 is a line; degree >= 2 a polynomial.
RowVector estimate_linefit(const std::vector<ScoredAnchor>& neighbors, Index degree);

/// Estimator dispatch for a single unit: exactly the value the table builder
/// stores there. For the random-pick method the config seed is mixed with
/// the unit index, so the whole table stays a pure function of the seed.
RowVector estimate_at_unit(const GeodesicTable& geo, const std::vector<Anchor>& anchors, Index unit,
                           const ProjectionConfig& config);

/// Predicted target vector for every map unit.
struct EstimationTable {
  Matrix values;  // n_units x n_targets

  Index n_units() const { return values.rows(); }
  Index n_targets() const { return values.cols(); }
};

EstimationTable build_estimation_table(const Som& som, const GeodesicTable& geo,
                                       const std::vector<Anchor>& anchors,
                                       const ProjectionConfig& config);

/// Everything needed to serve predictions on raw feature vectors.
struct ModelBundle {
  std::vector<std::string> feature_columns;
  std::vector<std::string> target_columns;
  Normalizer normalizer;
  bool has_pca = false;
  PcaModel pca;
  Som som;
  GeodesicTable geo;
  std::vector<Anchor> anchors;
  ProjectionConfig projection;
  EstimationTable table;
};

/// normalize -> (optionally) project -> BMU -> table lookup.
RowVector predict(const ModelBundle& bundle, const Eigen::Ref<const RowVector>& x_raw);
Matrix predict_rows(const ModelBundle& bundle, const Eigen::Ref<const Matrix>& x_raw);

/// Versioned single-file archive for the whole bundle.
void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

}  // namespace topoproj

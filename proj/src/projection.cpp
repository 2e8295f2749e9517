#include "topoproj/projection.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <fstream>
#include <set>

#include "io_binary.hpp"
#include "topoproj/rng.hpp"

namespace topoproj {

std::string to_string(ProjectionMethod method) {
  switch (method) {
    case ProjectionMethod::kWavg: return "WAVG";
    case ProjectionMethod::kAvg: return "AVG";
    case ProjectionMethod::kRand: return "RAND";
    case ProjectionMethod::kLinear: return "LINEAR";
    case ProjectionMethod::kPoly: return "POLY";
  }
  throw std::logic_error("to_string: unknown ProjectionMethod");
}

ProjectionMethod parse_projection_method(const std::string& name) {
  if (name == "WAVG" || name == "wavg") return ProjectionMethod::kWavg;
  if (name == "AVG" || name == "avg") return ProjectionMethod::kAvg;
  if (name == "RAND" || name == "rand") return ProjectionMethod::kRand;
  if (name == "LINEAR" || name == "linear") return ProjectionMethod::kLinear;
  if (name == "POLY" || name == "poly") return ProjectionMethod::kPoly;
  throw std::invalid_argument("unknown projection method '" + name +
                              "' (expected WAVG|AVG|RAND|LINEAR|POLY)");
}

void ProjectionConfig::validate(Index n_anchors) const {
  if (n_neighbors < 1) throw std::invalid_argument("ProjectionConfig: n_neighbors must be positive");
  if (n_neighbors > n_anchors)
    throw std::invalid_argument("ProjectionConfig: n_neighbors (" + std::to_string(n_neighbors) +
                                ") exceeds anchor count (" + std::to_string(n_anchors) + ")");
  if (method == ProjectionMethod::kPoly && poly_degree + 1 > n_neighbors)
    throw std::invalid_argument("ProjectionConfig: POLY needs n_neighbors >= poly_degree + 1");
  if (poly_degree < 1) throw std::invalid_argument("ProjectionConfig: poly_degree must be positive");
}

std::vector<Anchor> map_labeled(const Som& som, const Eigen::Ref<const Matrix>& x_normalized,
                                const Eigen::Ref<const Matrix>& y) {
  if (x_normalized.rows() == 0) throw std::invalid_argument("map_labeled: empty labeled set");
  if (x_normalized.rows() != y.rows())
    throw std::invalid_argument("map_labeled: feature and target row counts differ");
  std::vector<Anchor> anchors(static_cast<std::size_t>(x_normalized.rows()));
  for (Index i = 0; i < x_normalized.rows(); ++i) {
    anchors[static_cast<std::size_t>(i)] =
        Anchor{i, bmu(som, x_normalized.row(i)), y.row(i)};
  }
  return anchors;
}

std::vector<ScoredAnchor> nearest_anchors(const GeodesicTable& geo,
                                          const std::vector<Anchor>& anchors, Index unit, Index n) {
  if (anchors.empty()) throw std::invalid_argument("nearest_anchors: no anchors");
  if (n < 1) throw std::invalid_argument("nearest_anchors: n must be positive");
  if (n > static_cast<Index>(anchors.size()))
    throw std::invalid_argument("nearest_anchors: n exceeds anchor count");
  if (unit < 0 || unit >= geo.n_units) throw std::out_of_range("nearest_anchors: unit out of range");

  std::vector<ScoredAnchor> scored(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i)
    scored[i] = ScoredAnchor{anchors[i], geo.dist(unit, anchors[i].unit)};
  const auto closer = [](const ScoredAnchor& a, const ScoredAnchor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.anchor.sample_id < b.anchor.sample_id;
  };
  std::partial_sort(scored.begin(), scored.begin() + n, scored.end(), closer);
  scored.resize(static_cast<std::size_t>(n));
  return scored;
}

RowVector estimate_wavg(const std::vector<ScoredAnchor>& neighbors) {
  if (neighbors.empty()) throw std::invalid_argument("estimate_wavg: empty neighbor list");
  // 1/d blows up at d = 0; the limit concentrates all weight on the
  // zero-distance anchors, so average exactly those when any exist.
  bool any_zero = false;
  for (const auto& nb : neighbors) {
    if (nb.distance < 0.0) throw std::invalid_argument("estimate_wavg: negative distance");
    if (nb.distance == 0.0) any_zero = true;
  }
  RowVector sum = RowVector::Zero(neighbors.front().anchor.y.size());
  if (any_zero) {
    Index count = 0;
    for (const auto& nb : neighbors)
      if (nb.distance == 0.0) {
        sum += nb.anchor.y;
        ++count;
      }
    return sum / static_cast<Scalar>(count);
  }
  // Equal distances cancel out of the formula; take that path explicitly so
  // the result is bit-identical to the plain average.
  bool all_equal = true;
  for (const auto& nb : neighbors) all_equal = all_equal && nb.distance == neighbors.front().distance;
  if (all_equal) return estimate_avg(neighbors);

  Scalar weight_sum = 0.0;
  for (const auto& nb : neighbors) {
    const Scalar w = 1.0 / nb.distance;
    sum += w * nb.anchor.y;
    weight_sum += w;
  }
  return sum / weight_sum;
}

RowVector estimate_avg(const std::vector<ScoredAnchor>& neighbors) {
  if (neighbors.empty()) throw std::invalid_argument("estimate_avg: empty neighbor list");
  RowVector sum = RowVector::Zero(neighbors.front().anchor.y.size());
  for (const auto& nb : neighbors) sum += nb.anchor.y;
  return sum / static_cast<Scalar>(neighbors.size());
}

RowVector estimate_rand(const std::vector<Anchor>& anchors, Index n, std::uint64_t seed) {
  if (anchors.empty()) throw std::invalid_argument("estimate_rand: no anchors");
  if (n < 1 || n > static_cast<Index>(anchors.size()))
    throw std::invalid_argument("estimate_rand: n out of range");
  Rng rng(seed);
  const std::vector<Index> picks = sample_without_replacement(static_cast<Index>(anchors.size()), n, rng);
  RowVector sum = RowVector::Zero(anchors.front().y.size());
  for (const Index i : picks) sum += anchors[static_cast<std::size_t>(i)].y;
  return sum / static_cast<Scalar>(n);
}

RowVector estimate_linefit(const std::vector<ScoredAnchor>& neighbors, Index degree) {
  if (degree < 1) throw std::invalid_argument("estimate_linefit: degree must be >= 1");
  if (static_cast<Index>(neighbors.size()) < degree + 1)
    throw DegenerateFitError("estimate_linefit: need at least degree + 1 neighbors");

  std::set<Scalar> distinct;
  for (const auto& nb : neighbors) distinct.insert(nb.distance);
  if (static_cast<Index>(distinct.size()) < degree + 1)
    throw DegenerateFitError("estimate_linefit: fewer distinct distances than coefficients");

  const Index n = static_cast<Index>(neighbors.size());
  const Index n_targets = neighbors.front().anchor.y.size();
  Matrix design(n, degree + 1);
  Matrix rhs(n, n_targets);
  for (Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (Index d = 1; d <= degree; ++d) design(i, d) = design(i, d - 1) * neighbors[static_cast<std::size_t>(i)].distance;
    rhs.row(i) = neighbors[static_cast<std::size_t>(i)].anchor.y;
  }
  const Matrix coeffs = design.colPivHouseholderQr().solve(rhs);
  return coeffs.row(0);  // value of the fit at distance zero
}

RowVector estimate_at_unit(const GeodesicTable& geo, const std::vector<Anchor>& anchors, Index unit,
                           const ProjectionConfig& config) {
  switch (config.method) {
    case ProjectionMethod::kWavg:
      return estimate_wavg(nearest_anchors(geo, anchors, unit, config.n_neighbors));
    case ProjectionMethod::kAvg:
      return estimate_avg(nearest_anchors(geo, anchors, unit, config.n_neighbors));
    case ProjectionMethod::kRand:
      return estimate_rand(anchors, config.n_neighbors,
                           derive_seed(config.seed, "rand-unit", {static_cast<std::uint64_t>(unit)}));
    case ProjectionMethod::kLinear:
    case ProjectionMethod::kPoly: {
      const Index degree = config.method == ProjectionMethod::kLinear ? 1 : config.poly_degree;
      const auto neighbors = nearest_anchors(geo, anchors, unit, config.n_neighbors);
      try {
        return estimate_linefit(neighbors, degree);
      } catch (const DegenerateFitError&) {
        return estimate_avg(neighbors);
      }
    }
  }
  throw std::logic_error("estimate_at_unit: unknown ProjectionMethod");
}

EstimationTable build_estimation_table(const Som& som, const GeodesicTable& geo,
                                       const std::vector<Anchor>& anchors,
                                       const ProjectionConfig& config) {
  config.validate(static_cast<Index>(anchors.size()));
  if (geo.n_units != som.n_units())
    throw std::invalid_argument("build_estimation_table: geodesic table does not match the map");

  EstimationTable table;
  table.values.resize(som.n_units(), anchors.front().y.size());
  for (Index u = 0; u < som.n_units(); ++u)
    table.values.row(u) = estimate_at_unit(geo, anchors, u, config);
  return table;
}

namespace {

Matrix to_model_space(const ModelBundle& bundle, const Eigen::Ref<const Matrix>& x_raw) {
  if (x_raw.cols() != bundle.normalizer.offset.size())
    throw std::invalid_argument("predict: expected " + std::to_string(bundle.normalizer.offset.size()) +
                                " features, got " + std::to_string(x_raw.cols()));
  if (!x_raw.allFinite()) throw std::invalid_argument("predict: non-finite input");
  Matrix x = apply(bundle.normalizer, x_raw);
  if (bundle.has_pca) x = project(bundle.pca, x);
  return x;
}

}  // namespace

RowVector predict(const ModelBundle& bundle, const Eigen::Ref<const RowVector>& x_raw) {
  const Matrix x = to_model_space(bundle, x_raw);
  return bundle.table.values.row(bmu(bundle.som, x.row(0)));
}

Matrix predict_rows(const ModelBundle& bundle, const Eigen::Ref<const Matrix>& x_raw) {
  const Matrix x = to_model_space(bundle, x_raw);
  Matrix out(x.rows(), bundle.table.n_targets());
  for (Index i = 0; i < x.rows(); ++i) out.row(i) = bundle.table.values.row(bmu(bundle.som, x.row(i)));
  return out;
}

namespace {
constexpr char kBundleMagic[5] = "TPBD";
constexpr std::uint32_t kBundleVersion = 1;
}  // namespace

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  using namespace detail;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

  out.write(kBundleMagic, 4);
  write_u32(out, kBundleVersion);

  write_u64(out, bundle.feature_columns.size());
  for (const auto& name : bundle.feature_columns) write_string(out, name);
  write_u64(out, bundle.target_columns.size());
  for (const auto& name : bundle.target_columns) write_string(out, name);

  write_u32(out, static_cast<std::uint32_t>(bundle.normalizer.kind));
  write_matrix(out, bundle.normalizer.offset);
  write_matrix(out, bundle.normalizer.scale);

  write_u32(out, bundle.has_pca ? 1 : 0);
  if (bundle.has_pca) {
    write_matrix(out, bundle.pca.mean);
    write_matrix(out, bundle.pca.components);
    write_matrix(out, bundle.pca.eigenvalues);
    write_f64(out, bundle.pca.explained_fraction);
    write_i64(out, bundle.pca.k);
  }

  write_som(out, bundle.som);

  write_i64(out, bundle.geo.rows);
  write_i64(out, bundle.geo.cols);
  write_matrix(out, bundle.geo.dist);

  write_u64(out, bundle.anchors.size());
  for (const Anchor& a : bundle.anchors) {
    write_i64(out, a.sample_id);
    write_i64(out, a.unit);
    write_matrix(out, a.y);
  }

  write_u32(out, static_cast<std::uint32_t>(bundle.projection.method));
  write_i64(out, bundle.projection.n_neighbors);
  write_i64(out, bundle.projection.poly_degree);
  write_u64(out, bundle.projection.seed);

  write_matrix(out, bundle.table.values);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ModelBundle load_bundle(const std::string& path) {
  using namespace detail;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");

  expect_magic(in, kBundleMagic, "model bundle");
  const std::uint32_t version = read_u32(in);
  if (version != kBundleVersion)
    throw std::runtime_error("unsupported model bundle version " + std::to_string(version));

  ModelBundle bundle;
  const std::uint64_t n_features = read_u64(in);
  for (std::uint64_t i = 0; i < n_features; ++i) bundle.feature_columns.push_back(read_string(in));
  const std::uint64_t n_targets = read_u64(in);
  for (std::uint64_t i = 0; i < n_targets; ++i) bundle.target_columns.push_back(read_string(in));

  bundle.normalizer.kind = static_cast<NormalizerKind>(read_u32(in));
  bundle.normalizer.offset = read_matrix(in);
  bundle.normalizer.scale = read_matrix(in);

  bundle.has_pca = read_u32(in) != 0;
  if (bundle.has_pca) {
    bundle.pca.mean = read_matrix(in);
    bundle.pca.components = read_matrix(in);
    bundle.pca.eigenvalues = read_matrix(in);
    bundle.pca.explained_fraction = read_f64(in);
    bundle.pca.k = read_i64(in);
  }

  bundle.som = read_som(in);

  bundle.geo.rows = read_i64(in);
  bundle.geo.cols = read_i64(in);
  bundle.geo.dist = read_matrix(in);
  bundle.geo.n_units = bundle.geo.dist.rows();

  const std::uint64_t n_anchors = read_u64(in);
  for (std::uint64_t i = 0; i < n_anchors; ++i) {
    Anchor a;
    a.sample_id = read_i64(in);
    a.unit = read_i64(in);
    a.y = read_matrix(in);
    bundle.anchors.push_back(std::move(a));
  }

  bundle.projection.method = static_cast<ProjectionMethod>(read_u32(in));
  bundle.projection.n_neighbors = read_i64(in);
  bundle.projection.poly_degree = read_i64(in);
  bundle.projection.seed = read_u64(in);

  bundle.table.values = read_matrix(in);
  if (bundle.table.values.rows() != bundle.som.n_units())
    throw std::runtime_error("model bundle estimation table does not match its map");
  return bundle;
}

}  // namespace topoproj

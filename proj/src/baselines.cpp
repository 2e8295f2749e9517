#include "topoproj/baselines.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>

#include "topoproj/dataset.hpp"
#include "topoproj/rng.hpp"

namespace topoproj {

Matrix expand_powers(const Eigen::Ref<const Matrix>& x, Index degree) {
  if (degree < 1) throw std::invalid_argument("expand_powers: degree must be >= 1");
  Matrix out(x.rows(), x.cols() * degree);
  for (Index f = 0; f < x.cols(); ++f) {
    out.col(f * degree) = x.col(f);
    for (Index d = 1; d < degree; ++d)
      out.col(f * degree + d) = out.col(f * degree + d - 1).cwiseProduct(x.col(f));
  }
  return out;
}

LeastSquaresModel fit_least_squares(const Eigen::Ref<const Matrix>& x,
                                    const Eigen::Ref<const Matrix>& y, Index degree, Scalar ridge) {
  if (x.rows() != y.rows()) throw std::invalid_argument("fit_least_squares: row counts differ");
  const Matrix expanded = expand_powers(x, degree);
  const Index n_coef = expanded.cols() + 1;
  if (x.rows() < n_coef && ridge <= 0.0)
    throw std::invalid_argument("fit_least_squares: need at least " + std::to_string(n_coef) +
                                " rows for " + std::to_string(n_coef) + " coefficients");

  Matrix design;
  Matrix rhs;
  if (ridge > 0.0) {
    // Augmented rows shrink every coefficient except the intercept.
    design.setZero(x.rows() + expanded.cols(), n_coef);
    design.block(0, 0, x.rows(), 1).setOnes();
    design.block(0, 1, x.rows(), expanded.cols()) = expanded;
    design.block(x.rows(), 1, expanded.cols(), expanded.cols()) =
        Matrix::Identity(expanded.cols(), expanded.cols()) * std::sqrt(ridge);
    rhs.setZero(design.rows(), y.cols());
    rhs.topRows(x.rows()) = y;
  } else {
    design.resize(x.rows(), n_coef);
    design.col(0).setOnes();
    design.rightCols(expanded.cols()) = expanded;
    rhs = y;
  }

  const auto qr = design.colPivHouseholderQr();
  if (ridge <= 0.0 && qr.rank() < n_coef)
    throw RankDeficientError("fit_least_squares: design matrix has rank " +
                             std::to_string(qr.rank()) + " < " + std::to_string(n_coef));

  LeastSquaresModel model;
  model.degree = degree;
  model.n_features = x.cols();
  model.coefficients = qr.solve(rhs);
  if (!model.coefficients.allFinite())
    throw RankDeficientError("fit_least_squares: solve produced non-finite coefficients");
  return model;
}

Matrix predict_ls(const LeastSquaresModel& model, const Eigen::Ref<const Matrix>& x) {
  if (!model.fitted()) throw std::logic_error("predict_ls: model is not fitted");
  if (x.cols() != model.n_features)
    throw std::invalid_argument("predict_ls: expected " + std::to_string(model.n_features) +
                                " features, got " + std::to_string(x.cols()));
  const Matrix expanded = expand_powers(x, model.degree);
  return (expanded * model.coefficients.bottomRows(expanded.cols())).rowwise() +
         model.coefficients.row(0);
}

RowVector knn_predict(const Eigen::Ref<const Matrix>& x_train, const Eigen::Ref<const Matrix>& y_train,
                      const Eigen::Ref<const RowVector>& query, Index k) {
  if (x_train.rows() != y_train.rows()) throw std::invalid_argument("knn_predict: row counts differ");
  if (k < 1 || k > x_train.rows()) throw std::invalid_argument("knn_predict: k out of range");
  if (query.size() != x_train.cols())
    throw std::invalid_argument("knn_predict: query dimensionality mismatch");

  const Vector dist2 = (x_train.rowwise() - query).rowwise().squaredNorm();
  std::vector<Index> order(static_cast<std::size_t>(x_train.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
    if (dist2(a) != dist2(b)) return dist2(a) < dist2(b);
    return a < b;  // ties by sample order
  });

  RowVector sum = RowVector::Zero(y_train.cols());
  for (Index i = 0; i < k; ++i) sum += y_train.row(order[static_cast<std::size_t>(i)]);
  return sum / static_cast<Scalar>(k);
}

Matrix knn_predict_rows(const Eigen::Ref<const Matrix>& x_train,
                        const Eigen::Ref<const Matrix>& y_train,
                        const Eigen::Ref<const Matrix>& queries, Index k) {
  Matrix out(queries.rows(), y_train.cols());
  for (Index i = 0; i < queries.rows(); ++i) out.row(i) = knn_predict(x_train, y_train, queries.row(i), k);
  return out;
}

Matrix random_guess(const Eigen::Ref<const Matrix>& y_observed, RandomGuessKind kind,
                    std::uint64_t seed, Index n) {
  if (y_observed.rows() < 1) throw std::invalid_argument("random_guess: empty observations");
  if (n < 1) throw std::invalid_argument("random_guess: n must be positive");
  Rng rng(seed);
  Matrix out(n, y_observed.cols());
  if (kind == RandomGuessKind::kUniform) {
    const RowVector lo = y_observed.colwise().minCoeff();
    const RowVector hi = y_observed.colwise().maxCoeff();
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < out.cols(); ++j) out(i, j) = rng.uniform(lo(j), hi(j));
  } else {
    const RowVector mean = y_observed.colwise().mean();
    const RowVector std_dev =
        ((y_observed.rowwise() - mean).array().square().colwise().mean()).sqrt();
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < out.cols(); ++j) out(i, j) = rng.normal(mean(j), std_dev(j));
  }
  return out;
}

namespace {

// Row indices within eps of row i, self included.
std::vector<Index> neighborhood(const Eigen::Ref<const Matrix>& x, Index i, Scalar eps2) {
  const Vector dist2 = (x.rowwise() - x.row(i)).rowwise().squaredNorm();
  std::vector<Index> out;
  for (Index j = 0; j < x.rows(); ++j)
    if (dist2(j) <= eps2) out.push_back(j);
  return out;
}

}  // namespace

std::vector<int> dbscan(const Eigen::Ref<const Matrix>& x, const DbscanParams& params) {
  if (params.eps <= 0.0) throw std::invalid_argument("dbscan: eps must be positive");
  if (params.min_samples < 1) throw std::invalid_argument("dbscan: min_samples must be >= 1");

  constexpr int kUnvisited = -2, kNoise = -1;
  const Scalar eps2 = params.eps * params.eps;
  std::vector<int> labels(static_cast<std::size_t>(x.rows()), kUnvisited);
  int next_cluster = 0;

  for (Index i = 0; i < x.rows(); ++i) {
    if (labels[static_cast<std::size_t>(i)] != kUnvisited) continue;
    std::vector<Index> seeds = neighborhood(x, i, eps2);
    if (static_cast<Index>(seeds.size()) < params.min_samples) {
      labels[static_cast<std::size_t>(i)] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    labels[static_cast<std::size_t>(i)] = cluster;
    std::deque<Index> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const Index j = queue.front();
      queue.pop_front();
      int& label = labels[static_cast<std::size_t>(j)];
      if (label == kNoise) label = cluster;  // border point reached by a core
      if (label != kUnvisited) continue;
      label = cluster;
      const std::vector<Index> reach = neighborhood(x, j, eps2);
      if (static_cast<Index>(reach.size()) >= params.min_samples)
        queue.insert(queue.end(), reach.begin(), reach.end());
    }
  }
  for (int& label : labels)
    if (label == kUnvisited) label = kNoise;
  return labels;
}

ClusterStats cluster_stats(const std::vector<int>& labels, Scalar eps) {
  int max_label = -1;
  for (const int l : labels) max_label = std::max(max_label, l);

  ClusterStats stats;
  stats.eps = eps;
  stats.n_clusters = max_label + 1;
  std::vector<Index> sizes(static_cast<std::size_t>(max_label + 1), 0);
  for (const int l : labels) {
    if (l < 0) ++stats.n_outliers;
    else ++sizes[static_cast<std::size_t>(l)];
  }
  if (!sizes.empty()) {
    stats.largest = *std::max_element(sizes.begin(), sizes.end());
    stats.smallest = *std::min_element(sizes.begin(), sizes.end());
    stats.mean_size = static_cast<Scalar>(std::accumulate(sizes.begin(), sizes.end(), Index{0})) /
                      static_cast<Scalar>(sizes.size());
  }
  return stats;
}

std::vector<ClusterStats> dbscan_sweep(const Eigen::Ref<const Matrix>& x,
                                       const std::vector<Scalar>& eps_list, Index min_samples) {
  std::vector<ClusterStats> out;
  out.reserve(eps_list.size());
  for (const Scalar eps : eps_list)
    out.push_back(cluster_stats(dbscan(x, DbscanParams{eps, min_samples}), eps));
  return out;
}

void save_cluster_stats_csv(const std::vector<ClusterStats>& stats, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "eps,n_clusters,largest,mean,smallest,n_outliers\n";
  for (const ClusterStats& s : stats) {
    out << format_scalar(s.eps) << ',' << s.n_clusters << ',' << s.largest << ','
        << format_scalar(s.mean_size) << ',' << s.smallest << ',' << s.n_outliers << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace topoproj

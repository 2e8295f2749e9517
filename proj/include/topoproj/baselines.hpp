#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoproj/types.hpp"

namespace topoproj {

/// Thrown when the least-squares design matrix loses rank; callers may retry
/// with a small ridge term via the `ridge` parameter.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-feature polynomial regression (powers 1..degree of each feature, no
/// cross terms) with an intercept, fitted jointly for all target columns.
struct LeastSquaresModel {
  Index degree = 1;
  Index n_features = 0;
  Matrix coefficients;  // (1 + n_features * degree) x n_targets, intercept first

  bool fitted() const { return coefficients.size() > 0; }
};

/// Expands each feature to its powers 1..degree, keeping column blocks in
/// feature-major order (f0^1..f0^d, f1^1..f1^d, ...). No intercept column.
Matrix expand_powers(const Eigen::Ref<const Matrix>& x, Index degree);

/// Orthogonal-factorization least squares. With ridge == 0 a rank-deficient
/// design raises RankDeficientError; a positive ridge augments the system
/// with sqrt(ridge)·I rows (intercept excluded) and always solves.
LeastSquaresModel fit_least_squares(const Eigen::Ref<const Matrix>& x,
                                    const Eigen::Ref<const Matrix>& y, Index degree,
                                    Scalar ridge = 0.0);

Matrix predict_ls(const LeastSquaresModel& model, const Eigen::Ref<const Matrix>& x);

/// Mean of the k Euclidean-nearest training targets; ties by sample order.
RowVector knn_predict(const Eigen::Ref<const Matrix>& x_train, const Eigen::Ref<const Matrix>& y_train,
                      const Eigen::Ref<const RowVector>& query, Index k);
Matrix knn_predict_rows(const Eigen::Ref<const Matrix>& x_train,
                        const Eigen::Ref<const Matrix>& y_train,
                        const Eigen::Ref<const Matrix>& queries, Index k);

enum class RandomGuessKind { kUniform, kNormal };

/// n rows of random predictions: uniform within each target's observed
/// [min, max], or normal with each target's mean and (population) std.
Matrix random_guess(const Eigen::Ref<const Matrix>& y_observed, RandomGuessKind kind,
                    std::uint64_t seed, Index n);

struct DbscanParams {
  Scalar eps = 0.5;
  Index min_samples = 3;
};

/// Density clustering over Euclidean balls of radius eps (boundary
/// inclusive). Returns one cluster id per row, -1 for noise; deterministic
/// given the row order.
std::vector<int> dbscan(const Eigen::Ref<const Matrix>& x, const DbscanParams& params);

struct ClusterStats {
  Scalar eps = 0;
  Index n_clusters = 0;
  Index largest = 0;
  Scalar mean_size = 0;
  Index smallest = 0;
  Index n_outliers = 0;
};

ClusterStats cluster_stats(const std::vector<int>& labels, Scalar eps);

std::vector<ClusterStats> dbscan_sweep(const Eigen::Ref<const Matrix>& x,
                                       const std::vector<Scalar>& eps_list, Index min_samples);

/// CSV columns: eps, n_clusters, largest, mean, smallest, n_outliers.
void save_cluster_stats_csv(const std::vector<ClusterStats>& stats, const std::string& path);

}  // namespace topoproj

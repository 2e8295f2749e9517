#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topoproj/preprocess.hpp"
#include "topoproj/projection.hpp"
#include "topoproj/types.hpp"

namespace topoproj {

/// Evaluation methods the harness can score side by side: the map-projection
/// estimators plus the comparison regressors.
enum class EvalMethod {
  kSomWavg,
  kSomAvg,
  kSomRand,
  kSomLinear,
  kSomPoly,
  kLinear,      // least-squares, degree 1
  kPolynomial,  // least-squares, degree = poly_degree
  kKnn,
  kRandomUniform,
  kRandomNormal,
};

std::string to_string(EvalMethod method);
EvalMethod parse_eval_method(const std::string& name);
bool is_som_method(EvalMethod method);
ProjectionMethod projection_method_of(EvalMethod method);  // SOM methods only

/// Experiment knobs, loadable from a JSON file and overridable from the
/// command line. Lists are hyperparameter grids; singleton lists pin a cell.
struct ExperimentConfig {
  std::string labeled_path;             // CSV with features + targets
  std::string unlabeled_path;           // optional extra pool for map training
  bool energy_schema = false;           // parse labeled_path as the energy file
  std::vector<std::string> feature_columns;  // empty: all non-target columns
  std::vector<std::string> target_columns;

  std::vector<NormalizerKind> normalizers{NormalizerKind::kMinMax};
  Scalar pca_threshold = 0.0;   // 0 = off
  bool pca_before_som = false;  // regressors always use PCA when enabled; the map only with this flag
  std::vector<Index> grid_sizes{10};
  std::vector<Index> n_neighbors{5};
  std::vector<EvalMethod> methods{EvalMethod::kSomWavg};
  Index poly_degree = 2;
  Index knn_k = 5;

  Index labeled_size = 0;  // 0 = use every labeled row
  Scalar train_fraction = 0.8;
  Index folds = 5;
  Index repeats = 10;
  std::uint64_t base_seed = 1;

  Index som_iterations = 20000;
  Scalar lr_start = 0.5;
  Scalar lr_end = 0.05;
  Scalar radius_end = 1.0;

  void validate() const;  // throws std::invalid_argument
};

ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_json(const ExperimentConfig& cfg);

/// One scored cell: RMSE for one target under one configuration and repeat.
struct EvalCell {
  Index grid_size = 0;   // 0 for non-map methods
  Index n_neighbors = 0; // k for KNN, 0 when not applicable
  NormalizerKind normalizer = NormalizerKind::kMinMax;
  EvalMethod method = EvalMethod::kSomWavg;
  std::string target;
  std::uint64_t seed = 0;  // the repeat's derived seed, reported for replay
  Scalar rmse = 0;
};

struct EvalReport {
  std::vector<EvalCell> cells;

  /// Mean RMSE over repeats for a (method, target) pair; empty when absent.
  std::optional<Scalar> mean_rmse(EvalMethod method, const std::string& target) const;
};

/// Root-mean-squared error per target column, in the units of y.
RowVector rmse(const Eigen::Ref<const Matrix>& y_true, const Eigen::Ref<const Matrix>& y_pred);

/// 80/20 protocol: per repeat, draw the labeled subset, split it, train on
/// the training side, and score the held-out side. Grids with more than one
/// (size, N, normalizer) cell are resolved by k-fold cross validation on the
/// training side first. Targets stay in original units throughout.
EvalReport run_split_eval(const ExperimentConfig& cfg);

/// Leave-one-out protocol: every labeled point is predicted with itself
/// removed from the anchor set.
EvalReport run_loo_eval(const ExperimentConfig& cfg);

/// Full cross product of {grid size} x {N} x {normalizer} x {method},
/// scored per repeat with the split protocol; no model selection.
EvalReport run_sweep(const ExperimentConfig& cfg);

/// CSV schema: size,N,normalizer,method,target,seed,rmse.
void save_report_csv(const EvalReport& report, const std::string& path);

/// The experiment's datasets with feature/target columns resolved: labeled
/// features and targets row-aligned, plus the optional unlabeled pool.
struct ResolvedInputs {
  Matrix features;
  Matrix targets;
  Matrix pool;  // empty when no unlabeled file was given
  std::vector<std::string> feature_names;
  std::vector<std::string> target_names;
};

ResolvedInputs load_experiment_inputs(const ExperimentConfig& cfg);

/// Trains one deployable model on every labeled row, using the first entry
/// of each hyperparameter list (the first method must be a map-projection
/// method). The map trains on the unlabeled pool when one is configured,
/// otherwise on the labeled features.
ModelBundle train_full_bundle(const ExperimentConfig& cfg);

}  // namespace topoproj

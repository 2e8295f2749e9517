#include "topoproj/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "topoproj/baselines.hpp"
#include "topoproj/dataset.hpp"
#include "topoproj/energy.hpp"
#include "topoproj/rng.hpp"
#include "topoproj/umatrix.hpp"

namespace topoproj {

std::string to_string(EvalMethod method) {
  switch (method) {
    case EvalMethod::kSomWavg: return "WAVG";
    case EvalMethod::kSomAvg: return "AVG";
    case EvalMethod::kSomRand: return "RAND";
    case EvalMethod::kSomLinear: return "LINEAR";
    case EvalMethod::kSomPoly: return "POLY";
    case EvalMethod::kLinear: return "linreg";
    case EvalMethod::kPolynomial: return "polyreg";
    case EvalMethod::kKnn: return "knn";
    case EvalMethod::kRandomUniform: return "guess-uniform";
    case EvalMethod::kRandomNormal: return "guess-normal";
  }
  throw std::logic_error("to_string: unknown EvalMethod");
}

EvalMethod parse_eval_method(const std::string& name) {
  if (name == "WAVG") return EvalMethod::kSomWavg;
  if (name == "AVG") return EvalMethod::kSomAvg;
  if (name == "RAND") return EvalMethod::kSomRand;
  if (name == "LINEAR") return EvalMethod::kSomLinear;
  if (name == "POLY") return EvalMethod::kSomPoly;
  if (name == "linreg") return EvalMethod::kLinear;
  if (name == "polyreg") return EvalMethod::kPolynomial;
  if (name == "knn") return EvalMethod::kKnn;
  if (name == "guess-uniform") return EvalMethod::kRandomUniform;
  if (name == "guess-normal") return EvalMethod::kRandomNormal;
  throw std::invalid_argument(
      "unknown method '" + name +
      "' (expected WAVG|AVG|RAND|LINEAR|POLY|linreg|polyreg|knn|guess-uniform|guess-normal)");
}

bool is_som_method(EvalMethod method) {
  switch (method) {
    case EvalMethod::kSomWavg:
    case EvalMethod::kSomAvg:
    case EvalMethod::kSomRand:
    case EvalMethod::kSomLinear:
    case EvalMethod::kSomPoly:
      return true;
    default:
      return false;
  }
}

ProjectionMethod projection_method_of(EvalMethod method) {
  switch (method) {
    case EvalMethod::kSomWavg: return ProjectionMethod::kWavg;
    case EvalMethod::kSomAvg: return ProjectionMethod::kAvg;
    case EvalMethod::kSomRand: return ProjectionMethod::kRand;
    case EvalMethod::kSomLinear: return ProjectionMethod::kLinear;
    case EvalMethod::kSomPoly: return ProjectionMethod::kPoly;
    default:
      throw std::logic_error("projection_method_of: not a map-projection method");
  }
}

void ExperimentConfig::validate() const {
  if (labeled_path.empty()) throw std::invalid_argument("ExperimentConfig: labeled_path is required");
  if (target_columns.empty()) throw std::invalid_argument("ExperimentConfig: target_columns is required");
  if (normalizers.empty() || grid_sizes.empty() || n_neighbors.empty() || methods.empty())
    throw std::invalid_argument("ExperimentConfig: grid lists must be non-empty");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("ExperimentConfig: train_fraction must be in (0, 1)");
  if (pca_threshold < 0.0 || pca_threshold > 1.0)
    throw std::invalid_argument("ExperimentConfig: pca_threshold must be in [0, 1]");
  if (folds < 2) throw std::invalid_argument("ExperimentConfig: folds must be >= 2");
  if (repeats < 1) throw std::invalid_argument("ExperimentConfig: repeats must be >= 1");
  if (labeled_size < 0) throw std::invalid_argument("ExperimentConfig: labeled_size must be >= 0");
  if (poly_degree < 1 || knn_k < 1)
    throw std::invalid_argument("ExperimentConfig: poly_degree and knn_k must be >= 1");
  if (som_iterations < 1) throw std::invalid_argument("ExperimentConfig: som_iterations must be >= 1");
  for (const Index s : grid_sizes)
    if (s < 2) throw std::invalid_argument("ExperimentConfig: grid sizes must be >= 2");
  for (const Index n : n_neighbors)
    if (n < 1) throw std::invalid_argument("ExperimentConfig: n_neighbors entries must be >= 1");
}

namespace {

using nlohmann::json;

template <typename T, typename Parse>
std::vector<T> parse_list(const json& array, Parse parse) {
  std::vector<T> out;
  for (const auto& item : array) out.push_back(parse(item));
  return out;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }

  ExperimentConfig cfg;
  const auto get = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = doc.at(key).template get<std::decay_t<decltype(field)>>();
  };
  get("labeled_path", cfg.labeled_path);
  get("unlabeled_path", cfg.unlabeled_path);
  get("energy_schema", cfg.energy_schema);
  get("feature_columns", cfg.feature_columns);
  get("target_columns", cfg.target_columns);
  if (doc.contains("normalizers"))
    cfg.normalizers = parse_list<NormalizerKind>(
        doc.at("normalizers"), [](const json& j) { return parse_normalizer_kind(j.get<std::string>()); });
  get("pca_threshold", cfg.pca_threshold);
  get("pca_before_som", cfg.pca_before_som);
  if (doc.contains("grid_sizes"))
    cfg.grid_sizes =
        parse_list<Index>(doc.at("grid_sizes"), [](const json& j) { return j.get<Index>(); });
  if (doc.contains("n_neighbors"))
    cfg.n_neighbors =
        parse_list<Index>(doc.at("n_neighbors"), [](const json& j) { return j.get<Index>(); });
  if (doc.contains("methods"))
    cfg.methods = parse_list<EvalMethod>(
        doc.at("methods"), [](const json& j) { return parse_eval_method(j.get<std::string>()); });
  get("poly_degree", cfg.poly_degree);
  get("knn_k", cfg.knn_k);
  get("labeled_size", cfg.labeled_size);
  get("train_fraction", cfg.train_fraction);
  get("folds", cfg.folds);
  get("repeats", cfg.repeats);
  get("base_seed", cfg.base_seed);
  get("som_iterations", cfg.som_iterations);
  get("lr_start", cfg.lr_start);
  get("lr_end", cfg.lr_end);
  get("radius_end", cfg.radius_end);

  static const char* kKnownKeys[] = {
      "labeled_path", "unlabeled_path", "energy_schema", "feature_columns", "target_columns",
      "normalizers",  "pca_threshold",  "pca_before_som", "grid_sizes",     "n_neighbors",
      "methods",      "poly_degree",    "knn_k",          "labeled_size",   "train_fraction",
      "folds",        "repeats",        "base_seed",      "som_iterations", "lr_start",
      "lr_end",       "radius_end"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (std::find_if(std::begin(kKnownKeys), std::end(kKnownKeys),
                     [&](const char* k) { return key == k; }) == std::end(kKnownKeys))
      throw std::runtime_error(path + ": unknown config key '" + key + "'");
  }
  return cfg;
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
  json doc;
  doc["labeled_path"] = cfg.labeled_path;
  doc["unlabeled_path"] = cfg.unlabeled_path;
  doc["energy_schema"] = cfg.energy_schema;
  doc["feature_columns"] = cfg.feature_columns;
  doc["target_columns"] = cfg.target_columns;
  std::vector<std::string> norms;
  for (const auto n : cfg.normalizers) norms.push_back(to_string(n));
  doc["normalizers"] = norms;
  doc["pca_threshold"] = cfg.pca_threshold;
  doc["pca_before_som"] = cfg.pca_before_som;
  doc["grid_sizes"] = cfg.grid_sizes;
  doc["n_neighbors"] = cfg.n_neighbors;
  std::vector<std::string> methods;
  for (const auto m : cfg.methods) methods.push_back(to_string(m));
  doc["methods"] = methods;
  doc["poly_degree"] = cfg.poly_degree;
  doc["knn_k"] = cfg.knn_k;
  doc["labeled_size"] = cfg.labeled_size;
  doc["train_fraction"] = cfg.train_fraction;
  doc["folds"] = cfg.folds;
  doc["repeats"] = cfg.repeats;
  doc["base_seed"] = cfg.base_seed;
  doc["som_iterations"] = cfg.som_iterations;
  doc["lr_start"] = cfg.lr_start;
  doc["lr_end"] = cfg.lr_end;
  doc["radius_end"] = cfg.radius_end;
  return doc.dump(2);
}

RowVector rmse(const Eigen::Ref<const Matrix>& y_true, const Eigen::Ref<const Matrix>& y_pred) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols())
    throw std::invalid_argument("rmse: shape mismatch");
  if (y_true.rows() < 1) throw std::invalid_argument("rmse: empty inputs");
  return ((y_true - y_pred).array().square().colwise().mean()).sqrt();
}

std::optional<Scalar> EvalReport::mean_rmse(EvalMethod method, const std::string& target) const {
  Scalar sum = 0.0;
  Index count = 0;
  for (const EvalCell& cell : cells) {
    if (cell.method == method && cell.target == target) {
      sum += cell.rmse;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<Scalar>(count);
}

void save_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "size,N,normalizer,method,target,seed,rmse\n";
  for (const EvalCell& cell : report.cells) {
    out << cell.grid_size << ',' << cell.n_neighbors << ',' << to_string(cell.normalizer) << ','
        << to_string(cell.method) << ',' << cell.target << ',' << cell.seed << ','
        << format_scalar(cell.rmse) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ResolvedInputs load_experiment_inputs(const ExperimentConfig& cfg) {
  const Dataset labeled =
      cfg.energy_schema ? load_energy_dataset(cfg.labeled_path) : load_csv(cfg.labeled_path);

  ResolvedInputs data;
  data.target_names = cfg.target_columns;
  if (!cfg.feature_columns.empty()) {
    data.feature_names = cfg.feature_columns;
  } else {
    for (const auto& col : labeled.columns)
      if (std::find(cfg.target_columns.begin(), cfg.target_columns.end(), col) ==
          cfg.target_columns.end())
        data.feature_names.push_back(col);
  }
  if (data.feature_names.empty())
    throw std::invalid_argument("no feature columns left after removing targets");

  data.features = labeled.select_columns(data.feature_names).values;
  data.targets = labeled.select_columns(data.target_names).values;
  if (data.features.rows() < 2) throw std::invalid_argument("labeled dataset needs at least 2 rows");

  if (!cfg.unlabeled_path.empty()) {
    const Dataset pool = load_csv(cfg.unlabeled_path);
    for (const auto& name : data.feature_names)
      if (pool.column_index(name) < 0)
        throw std::invalid_argument("unlabeled pool is missing feature column '" + name +
                                    "'; pass explicit feature_columns or list every target");
    data.pool = pool.select_columns(data.feature_names).values;
  }
  return data;
}

namespace {

// ---------------------------------------------------------------------------
// Shared evaluation machinery
// ---------------------------------------------------------------------------

Matrix rows_of(const Eigen::Ref<const Matrix>& m, const std::vector<Index>& ids) {
  Matrix out(static_cast<Index>(ids.size()), m.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Index>(i)) = m.row(ids[i]);
  return out;
}

std::vector<Index> complement_of(Index n, std::vector<Index> exclude) {
  std::sort(exclude.begin(), exclude.end());
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n) - exclude.size());
  std::size_t e = 0;
  for (Index i = 0; i < n; ++i) {
    if (e < exclude.size() && exclude[e] == i) ++e;
    else out.push_back(i);
  }
  return out;
}

// A trained map plus its fitted input transforms, reused across every cell
// that shares (grid size, normalizer) within one repeat.
struct FittedMap {
  Normalizer normalizer;
  bool has_pca = false;
  PcaModel pca;
  Som som;
  GeodesicTable geo;

  Matrix to_model_space(const Eigen::Ref<const Matrix>& x) const {
    Matrix out = apply(normalizer, x);
    if (has_pca) out = project(pca, out);
    return out;
  }
};

struct RepeatContext {
  const ExperimentConfig& cfg;
  const ResolvedInputs& data;
  Index repeat;
  std::uint64_t trial_seed;

  Matrix pool;  // map-training features for this repeat (original units)
  std::map<std::pair<Index, int>, FittedMap> maps;

  const FittedMap& fitted_map(Index size, NormalizerKind norm) {
    const auto key = std::make_pair(size, static_cast<int>(norm));
    auto it = maps.find(key);
    if (it != maps.end()) return it->second;

    FittedMap fitted;
    fitted.normalizer = fit_normalizer(pool, norm);
    Matrix train_inputs = apply(fitted.normalizer, pool);
    if (cfg.pca_threshold > 0.0 && cfg.pca_before_som) {
      fitted.has_pca = true;
      fitted.pca = fit_pca(train_inputs, cfg.pca_threshold);
      train_inputs = project(fitted.pca, train_inputs);
    }

    SomConfig som_cfg;
    som_cfg.rows = size;
    som_cfg.cols = size;
    som_cfg.lr_start = cfg.lr_start;
    som_cfg.lr_end = cfg.lr_end;
    som_cfg.radius_end = cfg.radius_end;
    som_cfg.iterations = cfg.som_iterations;
    som_cfg.seed = derive_seed(cfg.base_seed, "som",
                               {static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(norm),
                                static_cast<std::uint64_t>(repeat)});
    fitted.som = train_som(train_inputs, som_cfg);
    fitted.geo = all_pairs_geodesic(build_umatrix(fitted.som));
    return maps.emplace(key, std::move(fitted)).first->second;
  }
};

// Predictions for query rows from their BMUs' estimates; equivalent to a
// full-table lookup but only touches the units that occur.
Matrix som_cell_predictions(const FittedMap& fitted, const Eigen::Ref<const Matrix>& x_anchor_raw,
                            const Eigen::Ref<const Matrix>& y_anchor,
                            const std::vector<Index>& anchor_ids,
                            const Eigen::Ref<const Matrix>& x_query_raw,
                            const ProjectionConfig& pcfg) {
  const Matrix x_anchor = fitted.to_model_space(x_anchor_raw);
  std::vector<Anchor> anchors(static_cast<std::size_t>(x_anchor.rows()));
  for (Index i = 0; i < x_anchor.rows(); ++i) {
    anchors[static_cast<std::size_t>(i)] =
        Anchor{anchor_ids[static_cast<std::size_t>(i)], bmu(fitted.som, x_anchor.row(i)), y_anchor.row(i)};
  }
  pcfg.validate(static_cast<Index>(anchors.size()));

  const Matrix x_query = fitted.to_model_space(x_query_raw);
  Matrix pred(x_query.rows(), y_anchor.cols());
  for (Index i = 0; i < x_query.rows(); ++i)
    pred.row(i) = estimate_at_unit(fitted.geo, anchors, bmu(fitted.som, x_query.row(i)), pcfg);
  return pred;
}

// One hyperparameter cell: grid size and N matter only for map methods,
// the normalizer for everything that consumes features.
struct Cell {
  Index size = 0;
  Index n = 0;
  NormalizerKind normalizer = NormalizerKind::kMinMax;
};

std::vector<Cell> candidate_cells(const ExperimentConfig& cfg, EvalMethod method) {
  std::vector<Cell> cells;
  if (is_som_method(method)) {
    for (const Index size : cfg.grid_sizes)
      for (const Index n : cfg.n_neighbors)
        for (const NormalizerKind norm : cfg.normalizers) cells.push_back(Cell{size, n, norm});
  } else if (method == EvalMethod::kRandomUniform || method == EvalMethod::kRandomNormal) {
    cells.push_back(Cell{0, 0, cfg.normalizers.front()});  // nothing to select
  } else {
    const Index n = method == EvalMethod::kKnn ? cfg.knn_k : 0;
    for (const NormalizerKind norm : cfg.normalizers) cells.push_back(Cell{0, n, norm});
  }
  return cells;
}

ProjectionConfig projection_config_for(const ExperimentConfig& cfg, EvalMethod method, Index n,
                                       std::uint64_t trial_seed) {
  ProjectionConfig pcfg;
  pcfg.method = projection_method_of(method);
  pcfg.n_neighbors = n;
  pcfg.poly_degree = cfg.poly_degree;
  pcfg.seed = trial_seed;
  return pcfg;
}

// Baseline regression fits on the training split, in normalized (and
// optionally PCA-projected) feature space; targets stay raw.
Matrix baseline_predictions(const ExperimentConfig& cfg, EvalMethod method, NormalizerKind norm,
                            const Eigen::Ref<const Matrix>& x_train_raw,
                            const Eigen::Ref<const Matrix>& y_train,
                            const Eigen::Ref<const Matrix>& x_test_raw, std::uint64_t guess_seed) {
  if (method == EvalMethod::kRandomUniform || method == EvalMethod::kRandomNormal) {
    const auto kind = method == EvalMethod::kRandomUniform ? RandomGuessKind::kUniform
                                                           : RandomGuessKind::kNormal;
    return random_guess(y_train, kind, guess_seed, x_test_raw.rows());
  }

  const Normalizer normalizer = fit_normalizer(x_train_raw, norm);
  Matrix x_train = apply(normalizer, x_train_raw);
  Matrix x_test = apply(normalizer, x_test_raw);
  if (cfg.pca_threshold > 0.0) {
    const PcaModel pca = fit_pca(x_train, cfg.pca_threshold);
    x_train = project(pca, x_train);
    x_test = project(pca, x_test);
  }

  switch (method) {
    case EvalMethod::kLinear:
    case EvalMethod::kPolynomial: {
      const Index degree = method == EvalMethod::kLinear ? 1 : cfg.poly_degree;
      try {
        return predict_ls(fit_least_squares(x_train, y_train, degree), x_test);
      } catch (const RankDeficientError&) {
        // Documented fallback: a tiny ridge keeps sweeps running when a
        // fold's design loses rank (constant feature, tiny split, ...).
        return predict_ls(fit_least_squares(x_train, y_train, degree, 1e-8), x_test);
      }
    }
    case EvalMethod::kKnn:
      return knn_predict_rows(x_train, y_train, x_test, std::min(cfg.knn_k, x_train.rows()));
    default:
      throw std::logic_error("baseline_predictions: unexpected method");
  }
}

// Predictions for the query rows under one (method, cell), fitted on the fit
// rows. Row ids index the labeled file.
Matrix predictions_for(RepeatContext& ctx, EvalMethod method, const Cell& cell,
                       const std::vector<Index>& fit_ids, const std::vector<Index>& query_ids) {
  const Matrix x_fit = rows_of(ctx.data.features, fit_ids);
  const Matrix y_fit = rows_of(ctx.data.targets, fit_ids);
  const Matrix x_query = rows_of(ctx.data.features, query_ids);

  if (is_som_method(method)) {
    const FittedMap& fitted = ctx.fitted_map(cell.size, cell.normalizer);
    return som_cell_predictions(fitted, x_fit, y_fit, fit_ids, x_query,
                                projection_config_for(ctx.cfg, method, cell.n, ctx.trial_seed));
  }
  // Mixing the first query id keeps random-guess draws distinct across the
  // per-point calls of the leave-one-out loop.
  const std::uint64_t guess_seed =
      derive_seed(ctx.cfg.base_seed, "guess",
                  {static_cast<std::uint64_t>(ctx.repeat), static_cast<std::uint64_t>(method),
                   static_cast<std::uint64_t>(query_ids.empty() ? 0 : query_ids.front())});
  return baseline_predictions(ctx.cfg, method, cell.normalizer, x_fit, y_fit, x_query, guess_seed);
}

// RMSE per target for one (method, cell) on explicit train/test row ids.
RowVector evaluate_cell(RepeatContext& ctx, EvalMethod method, const Cell& cell,
                        const std::vector<Index>& train_ids, const std::vector<Index>& test_ids) {
  return rmse(rows_of(ctx.data.targets, test_ids),
              predictions_for(ctx, method, cell, train_ids, test_ids));
}

// k-fold model selection on the training split: lowest mean RMSE over folds
// (averaged across targets), ties to the smaller grid, then smaller N, then
// normalizer list order.
Cell select_cell(RepeatContext& ctx, EvalMethod method, const std::vector<Cell>& cells,
                 const std::vector<Index>& train_ids) {
  if (cells.size() == 1) return cells.front();

  const Index folds = ctx.cfg.folds;
  if (static_cast<Index>(train_ids.size()) < folds)
    throw std::invalid_argument("training split smaller than the requested fold count");

  std::vector<Index> shuffled = train_ids;
  Rng rng(derive_seed(ctx.cfg.base_seed, "cv", {static_cast<std::uint64_t>(ctx.repeat)}));
  shuffle(shuffled, rng);

  // Contiguous folds, sizes as even as possible.
  std::vector<std::vector<Index>> fold_ids(static_cast<std::size_t>(folds));
  const Index base = static_cast<Index>(shuffled.size()) / folds;
  const Index extra = static_cast<Index>(shuffled.size()) % folds;
  std::size_t cursor = 0;
  for (Index f = 0; f < folds; ++f) {
    const Index len = base + (f < extra ? 1 : 0);
    for (Index i = 0; i < len; ++i) fold_ids[static_cast<std::size_t>(f)].push_back(shuffled[cursor++]);
  }

  Index normalizer_rank_of[3] = {0, 0, 0};
  for (std::size_t i = 0; i < ctx.cfg.normalizers.size(); ++i)
    normalizer_rank_of[static_cast<int>(ctx.cfg.normalizers[i])] = static_cast<Index>(i);

  const Cell* best = nullptr;
  Scalar best_score = 0.0;
  for (const Cell& cell : cells) {
    Scalar score_sum = 0.0;
    Index score_count = 0;
    for (Index f = 0; f < folds; ++f) {
      const auto& valid = fold_ids[static_cast<std::size_t>(f)];
      if (valid.empty()) continue;
      std::vector<Index> fit_ids;
      for (Index g = 0; g < folds; ++g)
        if (g != f)
          fit_ids.insert(fit_ids.end(), fold_ids[static_cast<std::size_t>(g)].begin(),
                         fold_ids[static_cast<std::size_t>(g)].end());
      std::sort(fit_ids.begin(), fit_ids.end());
      std::vector<Index> valid_sorted = valid;
      std::sort(valid_sorted.begin(), valid_sorted.end());
      score_sum += evaluate_cell(ctx, method, cell, fit_ids, valid_sorted).mean();
      ++score_count;
    }
    const Scalar score = score_sum / static_cast<Scalar>(score_count);
    const auto rank = [&](const Cell& c) {
      return std::make_tuple(c.size, c.n, normalizer_rank_of[static_cast<int>(c.normalizer)]);
    };
    if (best == nullptr || score < best_score || (score == best_score && rank(cell) < rank(*best))) {
      best = &cell;
      best_score = score;
    }
  }
  return *best;
}

// The labeled row ids this repeat works with, optionally subsampled.
std::vector<Index> labeled_ids_for_repeat(const ExperimentConfig& cfg, Index n_rows, Index repeat) {
  if (cfg.labeled_size <= 0 || cfg.labeled_size >= n_rows) {
    std::vector<Index> all(static_cast<std::size_t>(n_rows));
    std::iota(all.begin(), all.end(), Index{0});
    return all;
  }
  Rng rng(derive_seed(cfg.base_seed, "labeled", {static_cast<std::uint64_t>(repeat)}));
  std::vector<Index> ids = sample_without_replacement(n_rows, cfg.labeled_size, rng);
  std::sort(ids.begin(), ids.end());
  return ids;
}

// floor(fraction * count), nudged so exact products don't fall one short.
Index train_count(Scalar fraction, Index count) {
  return static_cast<Index>(std::floor(fraction * static_cast<Scalar>(count) + 1e-9));
}

void split_labeled(const ExperimentConfig& cfg, const std::vector<Index>& labeled_ids, Index repeat,
                   std::vector<Index>& train_ids, std::vector<Index>& test_ids) {
  std::vector<Index> order(labeled_ids.size());
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(derive_seed(cfg.base_seed, "split", {static_cast<std::uint64_t>(repeat)}));
  shuffle(order, rng);

  const Index n_train = train_count(cfg.train_fraction, static_cast<Index>(labeled_ids.size()));
  if (n_train < 1 || n_train >= static_cast<Index>(labeled_ids.size()))
    throw std::invalid_argument("labeled set too small for the requested split");
  train_ids.clear();
  test_ids.clear();
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Index id = labeled_ids[static_cast<std::size_t>(order[i])];
    if (static_cast<Index>(i) < n_train) train_ids.push_back(id);
    else test_ids.push_back(id);
  }
  std::sort(train_ids.begin(), train_ids.end());
  std::sort(test_ids.begin(), test_ids.end());
}

// Map-training pool: the dedicated unlabeled file when given, otherwise
// every labeled-file row that is not held out for testing.
Matrix pool_for_repeat(const ResolvedInputs& data, const std::vector<Index>& test_ids) {
  if (data.pool.rows() > 0) return data.pool;
  return rows_of(data.features, complement_of(data.features.rows(), test_ids));
}

void append_cells(EvalReport& report, const RepeatContext& ctx, EvalMethod method, const Cell& cell,
                  const std::vector<std::string>& target_names, const RowVector& errors) {
  for (Index t = 0; t < errors.size(); ++t) {
    EvalCell row;
    row.grid_size = cell.size;
    row.n_neighbors = cell.n;
    row.normalizer = cell.normalizer;
    row.method = method;
    row.target = target_names[static_cast<std::size_t>(t)];
    row.seed = ctx.trial_seed;
    row.rmse = errors(t);
    report.cells.push_back(std::move(row));
  }
}

}  // namespace

EvalReport run_split_eval(const ExperimentConfig& cfg) {
  cfg.validate();
  const ResolvedInputs data = load_experiment_inputs(cfg);

  EvalReport report;
  for (Index r = 0; r < cfg.repeats; ++r) {
    const std::vector<Index> labeled_ids = labeled_ids_for_repeat(cfg, data.features.rows(), r);
    std::vector<Index> train_ids, test_ids;
    split_labeled(cfg, labeled_ids, r, train_ids, test_ids);

    RepeatContext ctx{cfg, data, r,
                      derive_seed(cfg.base_seed, "trial", {static_cast<std::uint64_t>(r)}),
                      pool_for_repeat(data, test_ids),
                      {}};
    for (const EvalMethod method : cfg.methods) {
      const std::vector<Cell> cells = candidate_cells(cfg, method);
      const Cell chosen = select_cell(ctx, method, cells, train_ids);
      append_cells(report, ctx, method, chosen, data.target_names,
                   evaluate_cell(ctx, method, chosen, train_ids, test_ids));
    }
  }
  return report;
}

EvalReport run_loo_eval(const ExperimentConfig& cfg) {
  cfg.validate();
  const ResolvedInputs data = load_experiment_inputs(cfg);

  EvalReport report;
  for (Index r = 0; r < cfg.repeats; ++r) {
    const std::vector<Index> labeled_ids = labeled_ids_for_repeat(cfg, data.features.rows(), r);
    if (labeled_ids.size() < 2) throw std::invalid_argument("leave-one-out needs at least 2 labeled rows");

    RepeatContext ctx{cfg, data, r,
                      derive_seed(cfg.base_seed, "trial", {static_cast<std::uint64_t>(r)}),
                      Matrix{},
                      {}};
    // Nothing is held out wholesale here; the pool is the unlabeled file or
    // every labeled-file row.
    ctx.pool = pool_for_repeat(data, {});

    for (const EvalMethod method : cfg.methods) {
      for (const Cell& cell : candidate_cells(cfg, method)) {
        Matrix pred(static_cast<Index>(labeled_ids.size()), data.targets.cols());
        Matrix truth(static_cast<Index>(labeled_ids.size()), data.targets.cols());
        for (std::size_t i = 0; i < labeled_ids.size(); ++i) {
          std::vector<Index> anchor_ids = labeled_ids;
          anchor_ids.erase(anchor_ids.begin() + static_cast<std::ptrdiff_t>(i));
          const std::vector<Index> query{labeled_ids[i]};
          pred.row(static_cast<Index>(i)) = predictions_for(ctx, method, cell, anchor_ids, query);
          truth.row(static_cast<Index>(i)) = data.targets.row(labeled_ids[i]);
        }
        append_cells(report, ctx, method, cell, data.target_names, rmse(truth, pred));
      }
    }
  }
  return report;
}

ModelBundle train_full_bundle(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!is_som_method(cfg.methods.front()))
    throw std::invalid_argument("train_full_bundle: the first configured method must be one of "
                                "WAVG|AVG|RAND|LINEAR|POLY");
  const ResolvedInputs data = load_experiment_inputs(cfg);

  ModelBundle bundle;
  bundle.feature_columns = data.feature_names;
  bundle.target_columns = data.target_names;

  const Matrix pool = data.pool.rows() > 0 ? data.pool : data.features;
  const NormalizerKind norm = cfg.normalizers.front();
  const Index size = cfg.grid_sizes.front();

  bundle.normalizer = fit_normalizer(pool, norm);
  Matrix train_inputs = apply(bundle.normalizer, pool);
  if (cfg.pca_threshold > 0.0 && cfg.pca_before_som) {
    bundle.has_pca = true;
    bundle.pca = fit_pca(train_inputs, cfg.pca_threshold);
    train_inputs = project(bundle.pca, train_inputs);
  }

  SomConfig som_cfg;
  som_cfg.rows = size;
  som_cfg.cols = size;
  som_cfg.lr_start = cfg.lr_start;
  som_cfg.lr_end = cfg.lr_end;
  som_cfg.radius_end = cfg.radius_end;
  som_cfg.iterations = cfg.som_iterations;
  som_cfg.seed = derive_seed(cfg.base_seed, "som",
                             {static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(norm), 0});
  bundle.som = train_som(train_inputs, som_cfg);
  bundle.geo = all_pairs_geodesic(build_umatrix(bundle.som));

  Matrix x_labeled = apply(bundle.normalizer, data.features);
  if (bundle.has_pca) x_labeled = project(bundle.pca, x_labeled);
  bundle.anchors = map_labeled(bundle.som, x_labeled, data.targets);

  bundle.projection = ProjectionConfig{projection_method_of(cfg.methods.front()),
                                       cfg.n_neighbors.front(), cfg.poly_degree,
                                       derive_seed(cfg.base_seed, "trial", {0})};
  bundle.table = build_estimation_table(bundle.som, bundle.geo, bundle.anchors, bundle.projection);
  return bundle;
}

EvalReport run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const ResolvedInputs data = load_experiment_inputs(cfg);

  EvalReport report;
  for (Index r = 0; r < cfg.repeats; ++r) {
    const std::vector<Index> labeled_ids = labeled_ids_for_repeat(cfg, data.features.rows(), r);
    std::vector<Index> train_ids, test_ids;
    split_labeled(cfg, labeled_ids, r, train_ids, test_ids);

    RepeatContext ctx{cfg, data, r,
                      derive_seed(cfg.base_seed, "trial", {static_cast<std::uint64_t>(r)}),
                      pool_for_repeat(data, test_ids),
                      {}};
    for (const EvalMethod method : cfg.methods) {
      for (const Cell& cell : candidate_cells(cfg, method)) {
        append_cells(report, ctx, method, cell, data.target_names,
                     evaluate_cell(ctx, method, cell, train_ids, test_ids));
      }
    }
  }
  return report;
}

}  // namespace topoproj

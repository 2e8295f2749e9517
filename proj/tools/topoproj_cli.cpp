// Command-line front end: train/predict with a saved model, run the
// evaluation protocols, generate synthetic spectra, render U-matrices, and
// sweep DBSCAN settings. Every run writes a manifest.json into --out-dir so
// results can be traced back to the exact configuration that produced them.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topoproj/baselines.hpp"
#include "topoproj/dataset.hpp"
#include "topoproj/energy.hpp"
#include "topoproj/harness.hpp"
#include "topoproj/preprocess.hpp"
#include "topoproj/projection.hpp"
#include "topoproj/render.hpp"
#include "topoproj/rng.hpp"
#include "topoproj/som.hpp"
#include "topoproj/synth.hpp"
#include "topoproj/umatrix.hpp"

namespace fs = std::filesystem;

namespace {

using topoproj::Index;
using topoproj::Matrix;
using topoproj::Scalar;

/// Values for the experiment-level flags. Flags the user did not pass are
/// ignored in favor of the config file (or the built-in defaults), so the
/// parsed App is consulted for counts before anything here is applied.
struct ExperimentArgs {
  std::string config_path;
  std::string out_dir = "out";

  std::string labeled;
  std::string unlabeled;
  std::vector<std::string> features;
  std::vector<std::string> targets;
  std::vector<std::string> normalizers;
  std::vector<std::string> methods;
  std::vector<Index> grid;
  std::vector<Index> neighbors;
  double pca_threshold = 0.0;
  Index labeled_size = 0;
  double train_fraction = 0.8;
  Index folds = 5;
  Index repeats = 10;
  Index iterations = 20000;
  Index knn_k = 5;
  Index poly_degree = 2;
  std::uint64_t seed = 1;
};

void add_experiment_options(CLI::App& cmd, ExperimentArgs& a) {
  cmd.add_option("--config", a.config_path, "JSON experiment config; other flags override it")
      ->check(CLI::ExistingFile);
  cmd.add_option("--out-dir", a.out_dir, "Directory for outputs (created if missing)")
      ->capture_default_str();
  cmd.add_option("--labeled", a.labeled, "Labeled CSV (features + targets)");
  cmd.add_option("--unlabeled", a.unlabeled, "Unlabeled CSV used as the map-training pool");
  cmd.add_flag("--energy", "Parse the labeled file with the appliance-energy schema");
  cmd.add_option("--features", a.features, "Feature columns (default: all non-target columns)")
      ->delimiter(',');
  cmd.add_option("--targets", a.targets, "Target columns")->delimiter(',');
  cmd.add_option("--normalizers", a.normalizers, "Normalizer list: minmax|standard|robust")
      ->delimiter(',');
  cmd.add_option("--methods", a.methods,
                 "Method list: WAVG|AVG|RAND|LINEAR|POLY|linreg|polyreg|knn|"
                 "guess-uniform|guess-normal")
      ->delimiter(',');
  cmd.add_option("--grid", a.grid, "Square map sizes, e.g. 10,15,20")->delimiter(',');
  cmd.add_option("--n-neighbors", a.neighbors, "Anchor-neighbor counts, e.g. 3,5,7")
      ->delimiter(',');
  cmd.add_option("--pca", a.pca_threshold, "Explained-variance threshold in (0,1]; 0 disables");
  cmd.add_flag("--pca-before-som", "Feed PCA scores to the map, not just to the regressors");
  cmd.add_option("--labeled-size", a.labeled_size, "Random labeled subset per repeat; 0 = all");
  cmd.add_option("--train-fraction", a.train_fraction, "Training share of the labeled set");
  cmd.add_option("--folds", a.folds, "Cross-validation folds for model selection");
  cmd.add_option("--repeats", a.repeats, "Independently seeded repetitions");
  cmd.add_option("--iterations", a.iterations, "Map training iterations");
  cmd.add_option("--knn-k", a.knn_k, "k for the nearest-neighbor baseline");
  cmd.add_option("--poly-degree", a.poly_degree, "Degree for POLY and polyreg");
  cmd.add_option("--seed", a.seed, "Base seed; every stochastic step derives from it");
}

/// Config file first, then whichever flags were actually given on top.
topoproj::ExperimentConfig resolve_config(const CLI::App& cmd, const ExperimentArgs& a) {
  topoproj::ExperimentConfig cfg;
  if (cmd.count("--config") > 0) cfg = topoproj::load_experiment_config(a.config_path);
  if (cmd.count("--labeled") > 0) cfg.labeled_path = a.labeled;
  if (cmd.count("--unlabeled") > 0) cfg.unlabeled_path = a.unlabeled;
  if (cmd.count("--energy") > 0) cfg.energy_schema = true;
  if (cmd.count("--features") > 0) cfg.feature_columns = a.features;
  if (cmd.count("--targets") > 0) cfg.target_columns = a.targets;
  if (cmd.count("--normalizers") > 0) {
    cfg.normalizers.clear();
    for (const auto& name : a.normalizers)
      cfg.normalizers.push_back(topoproj::parse_normalizer_kind(name));
  }
  if (cmd.count("--methods") > 0) {
    cfg.methods.clear();
    for (const auto& name : a.methods) cfg.methods.push_back(topoproj::parse_eval_method(name));
  }
  if (cmd.count("--grid") > 0) cfg.grid_sizes = a.grid;
  if (cmd.count("--n-neighbors") > 0) cfg.n_neighbors = a.neighbors;
  if (cmd.count("--pca") > 0) cfg.pca_threshold = a.pca_threshold;
  if (cmd.count("--pca-before-som") > 0) cfg.pca_before_som = true;
  if (cmd.count("--labeled-size") > 0) cfg.labeled_size = a.labeled_size;
  if (cmd.count("--train-fraction") > 0) cfg.train_fraction = a.train_fraction;
  if (cmd.count("--folds") > 0) cfg.folds = a.folds;
  if (cmd.count("--repeats") > 0) cfg.repeats = a.repeats;
  if (cmd.count("--iterations") > 0) cfg.som_iterations = a.iterations;
  if (cmd.count("--knn-k") > 0) cfg.knn_k = a.knn_k;
  if (cmd.count("--poly-degree") > 0) cfg.poly_degree = a.poly_degree;
  if (cmd.count("--seed") > 0) cfg.base_seed = a.seed;
  return cfg;
}

fs::path ensure_out_dir(const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const nlohmann::json& config, const std::vector<std::string>& outputs) {
  nlohmann::json doc;
  doc["command"] = command;
  doc["config"] = config;
  doc["outputs"] = outputs;
  const fs::path path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

nlohmann::json config_json(const topoproj::ExperimentConfig& cfg) {
  return nlohmann::json::parse(topoproj::experiment_config_json(cfg));
}

/// Mean RMSE over repeats for each (method, target) pair, in first-appearance
/// order. Only meaningful when every pair has one cell per repeat.
void print_summary(const topoproj::EvalReport& report) {
  std::vector<std::pair<topoproj::EvalMethod, std::string>> pairs;
  for (const auto& cell : report.cells) {
    const auto key = std::make_pair(cell.method, cell.target);
    if (std::find(pairs.begin(), pairs.end(), key) == pairs.end()) pairs.push_back(key);
  }
  for (const auto& [method, target] : pairs) {
    const auto mean = report.mean_rmse(method, target);
    if (!mean) continue;
    std::cout << std::left << std::setw(14) << topoproj::to_string(method) << std::setw(14)
              << target << "mean rmse " << topoproj::format_scalar(*mean) << '\n';
  }
}

int cmd_train(const CLI::App& cmd, const ExperimentArgs& a) {
  const auto cfg = resolve_config(cmd, a);
  const auto dir = ensure_out_dir(a.out_dir);
  const auto bundle = topoproj::train_full_bundle(cfg);
  topoproj::save_bundle(bundle, (dir / "model.bundle").string());
  write_manifest(dir, "train", config_json(cfg), {"model.bundle"});
  std::cout << "trained " << bundle.som.config.rows << "x" << bundle.som.config.cols
            << " map with " << bundle.anchors.size() << " anchors; wrote "
            << (dir / "model.bundle").string() << '\n';
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input_path,
                const std::string& out_dir) {
  const auto bundle = topoproj::load_bundle(model_path);
  const auto input = topoproj::load_csv(input_path);
  const auto x = input.select_columns(bundle.feature_columns);
  const auto dir = ensure_out_dir(out_dir);
  topoproj::Dataset predictions{bundle.target_columns,
                                topoproj::predict_rows(bundle, x.values)};
  topoproj::save_csv(predictions, (dir / "predictions.csv").string());
  write_manifest(dir, "predict",
                 nlohmann::json{{"model", model_path}, {"input", input_path}},
                 {"predictions.csv"});
  std::cout << "wrote " << predictions.rows() << " predictions to "
            << (dir / "predictions.csv").string() << '\n';
  return 0;
}

int cmd_eval(const CLI::App& cmd, const ExperimentArgs& a, bool loo) {
  const auto cfg = resolve_config(cmd, a);
  const auto dir = ensure_out_dir(a.out_dir);
  const auto report = loo ? topoproj::run_loo_eval(cfg) : topoproj::run_split_eval(cfg);
  topoproj::save_report_csv(report, (dir / "report.csv").string());
  write_manifest(dir, loo ? "loo" : "eval", config_json(cfg), {"report.csv"});
  print_summary(report);
  std::cout << "wrote " << report.cells.size() << " cells to "
            << (dir / "report.csv").string() << '\n';
  return 0;
}

int cmd_sweep(const CLI::App& cmd, const ExperimentArgs& a) {
  const auto cfg = resolve_config(cmd, a);
  const auto dir = ensure_out_dir(a.out_dir);
  const auto report = topoproj::run_sweep(cfg);
  topoproj::save_report_csv(report, (dir / "sweep.csv").string());
  write_manifest(dir, "sweep", config_json(cfg), {"sweep.csv"});
  std::cout << "wrote " << report.cells.size() << " cells to "
            << (dir / "sweep.csv").string() << '\n';
  return 0;
}

int cmd_umatrix(const CLI::App& cmd, const ExperimentArgs& a, bool svg) {
  const auto cfg = resolve_config(cmd, a);
  cfg.validate();
  const auto inputs = topoproj::load_experiment_inputs(cfg);
  const Matrix& pool = inputs.pool.rows() > 0 ? inputs.pool : inputs.features;

  const auto normalizer = topoproj::fit_normalizer(pool, cfg.normalizers.front());
  Matrix train_inputs = topoproj::apply(normalizer, pool);
  Matrix labeled_inputs = topoproj::apply(normalizer, inputs.features);
  if (cfg.pca_threshold > 0.0 && cfg.pca_before_som) {
    const auto pca = topoproj::fit_pca(train_inputs, cfg.pca_threshold);
    train_inputs = topoproj::project(pca, train_inputs);
    labeled_inputs = topoproj::project(pca, labeled_inputs);
  }

  topoproj::SomConfig som_cfg;
  som_cfg.rows = cfg.grid_sizes.front();
  som_cfg.cols = cfg.grid_sizes.front();
  som_cfg.lr_start = cfg.lr_start;
  som_cfg.lr_end = cfg.lr_end;
  som_cfg.radius_end = cfg.radius_end;
  som_cfg.iterations = cfg.som_iterations;
  som_cfg.seed = topoproj::derive_seed(
      cfg.base_seed, "som",
      {static_cast<std::uint64_t>(som_cfg.rows),
       static_cast<std::uint64_t>(cfg.normalizers.front()), 0});
  const auto som = topoproj::train_som(train_inputs, som_cfg);
  const auto anchors = topoproj::map_labeled(som, labeled_inputs, inputs.targets);
  const auto um = topoproj::build_umatrix(som);

  const auto dir = ensure_out_dir(a.out_dir);
  std::vector<std::string> outputs{"umatrix.pgm", "umatrix.pgm.anchors.csv", "map.som"};
  topoproj::render_umatrix_pgm(um, anchors, (dir / "umatrix.pgm").string());
  if (svg) {
    topoproj::render_umatrix_svg(um, anchors, (dir / "umatrix.svg").string());
    outputs.insert(outputs.end() - 1, {"umatrix.svg", "umatrix.svg.anchors.csv"});
  }
  topoproj::save_som(som, (dir / "map.som").string());
  write_manifest(dir, "umatrix", config_json(cfg), outputs);
  std::cout << "rendered " << um.expanded.rows() << "x" << um.expanded.cols()
            << " U-matrix with " << anchors.size() << " anchors to "
            << (dir / "umatrix.pgm").string() << '\n';
  return 0;
}

/// Feature and target tables glued side by side into one labeled CSV.
topoproj::Dataset concat_columns(const topoproj::Dataset& a, const topoproj::Dataset& b) {
  topoproj::Dataset out;
  out.columns = a.columns;
  out.columns.insert(out.columns.end(), b.columns.begin(), b.columns.end());
  out.values.resize(a.rows(), a.cols() + b.cols());
  out.values.leftCols(a.cols()) = a.values;
  out.values.rightCols(b.cols()) = b.values;
  return out;
}

int cmd_synth(Index n_unlabeled, Index n_labeled, Index channels, Index targets, Scalar noise,
              std::uint64_t seed, const std::string& out_dir) {
  const auto spectra =
      topoproj::generate_synthetic_spectra(n_unlabeled, n_labeled, channels, targets, seed, noise);
  const auto dir = ensure_out_dir(out_dir);
  topoproj::save_csv(spectra.unlabeled_x, (dir / "unlabeled.csv").string());
  topoproj::save_csv(spectra.unlabeled_y, (dir / "unlabeled_targets.csv").string());
  topoproj::save_csv(concat_columns(spectra.labeled_x, spectra.labeled_y),
                     (dir / "labeled.csv").string());
  write_manifest(dir, "synth",
                 nlohmann::json{{"n_unlabeled", n_unlabeled},
                                {"n_labeled", n_labeled},
                                {"channels", channels},
                                {"targets", targets},
                                {"noise", noise},
                                {"seed", seed}},
                 {"unlabeled.csv", "unlabeled_targets.csv", "labeled.csv"});
  std::cout << "wrote " << n_unlabeled << " unlabeled + " << n_labeled << " labeled samples to "
            << dir.string() << '\n';
  return 0;
}

int cmd_dbscan_sweep(const std::string& input_path, bool energy, const std::string& normalizer,
                     const std::vector<Scalar>& eps_list, Index min_pts,
                     const std::string& out_dir) {
  topoproj::Dataset data =
      energy ? topoproj::load_energy_dataset(input_path) : topoproj::load_csv(input_path);
  if (energy) data = data.drop_columns({topoproj::kEnergyTargetColumn});

  const auto norm = topoproj::fit_normalizer(data.values, topoproj::parse_normalizer_kind(normalizer));
  const Matrix x = topoproj::apply(norm, data.values);
  const auto stats = topoproj::dbscan_sweep(x, eps_list, min_pts);

  const auto dir = ensure_out_dir(out_dir);
  topoproj::save_cluster_stats_csv(stats, (dir / "clusters.csv").string());
  write_manifest(dir, "dbscan-sweep",
                 nlohmann::json{{"input", input_path},
                                {"energy", energy},
                                {"normalizer", normalizer},
                                {"eps", eps_list},
                                {"min_pts", min_pts}},
                 {"clusters.csv"});
  for (const auto& s : stats)
    std::cout << "eps " << topoproj::format_scalar(s.eps) << ": " << s.n_clusters
              << " clusters, " << s.n_outliers << " outliers\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter prediction by topological projection on self-organizing maps"};
  app.require_subcommand(1);

  ExperimentArgs train_args;
  auto* train = app.add_subcommand("train", "Train a model on every labeled row and save it");
  add_experiment_options(*train, train_args);
  train->callback([&] { cmd_train(*train, train_args); });

  std::string predict_model, predict_input, predict_out = "out";
  auto* predict = app.add_subcommand("predict", "Predict targets for a CSV of feature rows");
  predict->add_option("--model", predict_model, "Saved model bundle")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--input", predict_input, "CSV with at least the model's feature columns")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--out-dir", predict_out, "Directory for outputs")->capture_default_str();
  predict->callback([&] { cmd_predict(predict_model, predict_input, predict_out); });

  ExperimentArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Train/test split evaluation with CV model selection");
  add_experiment_options(*eval, eval_args);
  eval->callback([&] { cmd_eval(*eval, eval_args, /*loo=*/false); });

  ExperimentArgs loo_args;
  auto* loo = app.add_subcommand("loo", "Leave-one-out evaluation over the labeled set");
  add_experiment_options(*loo, loo_args);
  loo->callback([&] { cmd_eval(*loo, loo_args, /*loo=*/true); });

  ExperimentArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Score the full hyperparameter cross product");
  add_experiment_options(*sweep, sweep_args);
  sweep->callback([&] { cmd_sweep(*sweep, sweep_args); });

  ExperimentArgs um_args;
  bool um_svg = false;
  auto* umatrix = app.add_subcommand("umatrix", "Render the trained map's U-matrix");
  add_experiment_options(*umatrix, um_args);
  umatrix->add_flag("--svg", um_svg, "Also write an SVG rendering");
  umatrix->callback([&] { cmd_umatrix(*umatrix, um_args, um_svg); });

  Index synth_unlabeled = 5000, synth_labeled = 67, synth_channels = 512, synth_targets = 13;
  Scalar synth_noise = 0.01;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "out";
  auto* synth = app.add_subcommand("synth", "Generate synthetic spectra datasets");
  synth->add_option("--n-unlabeled", synth_unlabeled)->capture_default_str();
  synth->add_option("--n-labeled", synth_labeled)->capture_default_str();
  synth->add_option("--channels", synth_channels)->capture_default_str();
  synth->add_option("--n-targets", synth_targets)->capture_default_str();
  synth->add_option("--noise", synth_noise, "Additive spectrum noise amplitude")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--out-dir", synth_out)->capture_default_str();
  synth->callback([&] {
    cmd_synth(synth_unlabeled, synth_labeled, synth_channels, synth_targets, synth_noise,
              synth_seed, synth_out);
  });

  std::string db_input, db_normalizer = "minmax", db_out = "out";
  bool db_energy = false;
  std::vector<Scalar> db_eps;
  Index db_min_pts = 3;
  auto* db = app.add_subcommand("dbscan-sweep", "Cluster-count statistics across eps values");
  db->add_option("--input", db_input, "Feature CSV (or the energy file with --energy)")
      ->required()
      ->check(CLI::ExistingFile);
  db->add_flag("--energy", db_energy, "Parse --input with the appliance-energy schema");
  db->add_option("--normalizer", db_normalizer, "minmax|standard|robust")->capture_default_str();
  db->add_option("--eps", db_eps, "Neighborhood radii, e.g. 0.5,1,2")
      ->required()
      ->delimiter(',');
  db->add_option("--min-pts", db_min_pts, "Core-point density threshold")->capture_default_str();
  db->add_option("--out-dir", db_out)->capture_default_str();
  db->callback([&] {
    cmd_dbscan_sweep(db_input, db_energy, db_normalizer, db_eps, db_min_pts, db_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

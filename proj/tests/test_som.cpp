#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include <doctest.h>

#include "test_util.hpp"
#include "topoproj/rng.hpp"
#include "topoproj/som.hpp"

using namespace topoproj;

namespace {

/// Two tight, well-separated Gaussian blobs; rows 0..n-1 belong to blob 0.
Matrix two_blobs(Index n_per_blob, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(2 * n_per_blob, 2);
  for (Index i = 0; i < n_per_blob; ++i) x.row(i) << rng.normal(0.0, 0.5), rng.normal(0.0, 0.5);
  for (Index i = n_per_blob; i < 2 * n_per_blob; ++i)
    x.row(i) << rng.normal(10.0, 0.5), rng.normal(10.0, 0.5);
  return x;
}

/// The documented random-uniform-in-range initial codebook: one splitmix64
/// stream seeded with config.seed, filled unit by unit, feature by feature.
Matrix initial_codebook(const Eigen::Ref<const Matrix>& x, const SomConfig& config) {
  Rng rng(config.seed);
  const RowVector lo = x.colwise().minCoeff();
  const RowVector hi = x.colwise().maxCoeff();
  Matrix init(config.rows * config.cols, x.cols());
  for (Index u = 0; u < init.rows(); ++u)
    for (Index f = 0; f < init.cols(); ++f) init(u, f) = rng.uniform(lo(f), hi(f));
  return init;
}

}  // namespace

TEST_CASE("som config validation") {
  SomConfig bad;
  bad.rows = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = SomConfig{};
  bad.lr_end = 0.9;  // above lr_start
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = SomConfig{};
  bad.radius_start = 1.0;
  bad.radius_end = 2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = SomConfig{};
  bad.iterations = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  SomConfig good;
  CHECK(good.effective_radius_start() == doctest::Approx(5.0));  // max(10,10)/2
  good.rows = 4;
  good.cols = 8;
  CHECK(good.effective_radius_start() == doctest::Approx(4.0));
}

TEST_CASE("train_som: single-sample dataset pulls every unit onto the sample") {
  Matrix x(1, 3);
  x << 2.0, -1.0, 0.5;
  SomConfig cfg;
  cfg.rows = cfg.cols = 3;
  cfg.iterations = 200;
  cfg.seed = 4;
  const Som som = train_som(x, cfg);
  for (Index u = 0; u < som.n_units(); ++u)
    CHECK((som.codebook.row(u) - x.row(0)).norm() < 1e-6);
  CHECK(quantization_error(som, x) < 1e-6);
}

TEST_CASE("train_som: fixed seed reproduces the codebook bit for bit") {
  const Matrix x = two_blobs(30, 1);
  SomConfig cfg;
  cfg.rows = cfg.cols = 5;
  cfg.iterations = 500;
  cfg.seed = 77;
  const Som a = train_som(x, cfg);
  const Som b = train_som(x, cfg);
  CHECK(a.codebook == b.codebook);
}

TEST_CASE("train_som: blob BMU regions are disjoint and quantization error drops") {
  const Index n_per_blob = 100;
  int disjoint_runs = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = two_blobs(n_per_blob, 1000 + seed);
    SomConfig cfg;
    cfg.rows = cfg.cols = 10;
    cfg.iterations = 2000;
    cfg.seed = seed;
    const Som som = train_som(x, cfg);

    // Every seed must reduce quantization error against the documented
    // random-in-range initial codebook.
    Som init;
    init.config = cfg;
    init.dim = 2;
    init.codebook = initial_codebook(x, cfg);
    CHECK(quantization_error(som, x) < quantization_error(init, x));

    std::set<Index> units_a, units_b;
    for (Index i = 0; i < x.rows(); ++i) {
      const Index u = bmu(som, x.row(i));
      (i < n_per_blob ? units_a : units_b).insert(u);
    }
    std::vector<Index> overlap;
    std::set_intersection(units_a.begin(), units_a.end(), units_b.begin(), units_b.end(),
                          std::back_inserter(overlap));
    if (overlap.empty()) ++disjoint_runs;
  }
  CHECK(disjoint_runs >= 9);
}

TEST_CASE("train_som: codebook stays within the per-feature data range") {
  const Matrix x = two_blobs(50, 3);
  SomConfig cfg;
  cfg.rows = cfg.cols = 6;
  cfg.iterations = 3000;
  cfg.seed = 5;
  const Som som = train_som(x, cfg);
  const RowVector lo = x.colwise().minCoeff(), hi = x.colwise().maxCoeff();
  const RowVector range = hi - lo;
  for (Index f = 0; f < x.cols(); ++f) {
    CHECK(som.codebook.col(f).minCoeff() >= lo(f) - range(f));
    CHECK(som.codebook.col(f).maxCoeff() <= hi(f) + range(f));
  }
}

TEST_CASE("train_som: input validation") {
  SomConfig cfg;
  cfg.rows = cfg.cols = 2;
  CHECK_THROWS(train_som(Matrix(0, 3), cfg));
  Matrix bad(1, 2);
  bad << 1.0, std::nan("");
  CHECK_THROWS(train_som(bad, cfg));
}

TEST_CASE("bmu: exact codebook hit, tie to lower index, brute-force parity") {
  Rng rng(8);
  Som som;
  som.config.rows = som.config.cols = 5;
  som.dim = 4;
  som.codebook.resize(25, 4);
  for (Index u = 0; u < 25; ++u)
    for (Index f = 0; f < 4; ++f) som.codebook(u, f) = rng.uniform(-1.0, 1.0);

  CHECK(bmu(som, som.codebook.row(17)) == 17);

  // Equidistant pair: units 0 and 1 straddle the query symmetrically.
  Som tie;
  tie.config.rows = tie.config.cols = 2;
  tie.dim = 1;
  tie.codebook.resize(4, 1);
  tie.codebook << 0.0, 2.0, 5.0, 9.0;
  RowVector q(1);
  q << 1.0;
  CHECK(bmu(tie, q) == 0);

  for (int trial = 0; trial < 1000; ++trial) {
    RowVector x(4);
    for (Index f = 0; f < 4; ++f) x(f) = rng.uniform(-1.5, 1.5);
    Index best = 0;
    Scalar best_d = (som.codebook.row(0) - x).squaredNorm();
    for (Index u = 1; u < 25; ++u) {
      const Scalar d = (som.codebook.row(u) - x).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = u;
      }
    }
    CHECK(bmu(som, x) == best);
  }

  RowVector wrong(3);
  wrong << 1, 2, 3;
  CHECK_THROWS(bmu(som, wrong));
}

TEST_CASE("quantization_error: codebook itself scores zero; known offset scores its distance") {
  Som som;
  som.config.rows = som.config.cols = 2;
  som.dim = 2;
  som.codebook.resize(4, 2);
  som.codebook << 0, 0, 1, 0, 0, 1, 1, 1;

  CHECK(quantization_error(som, som.codebook) == doctest::Approx(0.0));

  Matrix one(1, 2);
  one << 0, -3;  // distance 3 from the nearest unit (0, 0)
  CHECK(quantization_error(som, one) == doctest::Approx(3.0));

  Rng rng(12);
  Matrix x(40, 2);
  for (Index r = 0; r < 40; ++r) x.row(r) << rng.uniform(0, 1), rng.uniform(0, 1);
  Scalar total = 0;
  for (Index r = 0; r < 40; ++r) {
    Scalar best = (som.codebook.row(0) - x.row(r)).norm();
    for (Index u = 1; u < 4; ++u) best = std::min(best, (som.codebook.row(u) - x.row(r)).norm());
    total += best;
  }
  CHECK(quantization_error(som, x) == doctest::Approx(total / 40.0));
}

TEST_CASE("som serialization: file and stream round trips preserve everything") {
  const Matrix x = two_blobs(20, 9);
  SomConfig cfg;
  cfg.rows = 3;
  cfg.cols = 4;
  cfg.iterations = 300;
  cfg.seed = 21;
  const Som som = train_som(x, cfg);

  const auto path = testutil::temp_path("map.som");
  save_som(som, path);
  const Som back = load_som(path);
  CHECK(back.config.rows == som.config.rows);
  CHECK(back.config.cols == som.config.cols);
  CHECK(back.config.seed == som.config.seed);
  CHECK(back.config.iterations == som.config.iterations);
  CHECK(back.dim == som.dim);
  CHECK(back.codebook == som.codebook);

  std::stringstream buffer;
  write_som(buffer, som);
  const Som streamed = read_som(buffer);
  CHECK(streamed.codebook == som.codebook);

  // Corrupted magic is rejected.
  testutil::write_text(path, "NOPE....");
  CHECK_THROWS(load_som(path));
}

TEST_CASE("som unit index mapping is a bijection") {
  Som som;
  som.config.rows = 4;
  som.config.cols = 7;
  std::set<std::pair<Index, Index>> seen;
  for (Index u = 0; u < som.n_units(); ++u) {
    const auto rc = std::make_pair(som.unit_row(u), som.unit_col(u));
    CHECK(som.unit_at(rc.first, rc.second) == u);
    seen.insert(rc);
  }
  CHECK(seen.size() == static_cast<std::size_t>(som.n_units()));
}

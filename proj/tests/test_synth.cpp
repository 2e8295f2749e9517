#include <cmath>
#include <cstdint>

#include <doctest.h>

#include "topoproj/synth.hpp"

using namespace topoproj;

namespace {

Scalar correlation(const Vector& a, const Vector& b) {
  const Scalar ma = a.mean(), mb = b.mean();
  const Vector da = a.array() - ma, db = b.array() - mb;
  return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

}  // namespace

TEST_CASE("generate_synthetic_spectra: shapes and column names") {
  const auto data = generate_synthetic_spectra(30, 7, 64, 5, 1, 0.01);
  CHECK(data.unlabeled_x.rows() == 30);
  CHECK(data.unlabeled_x.cols() == 64);
  CHECK(data.unlabeled_y.rows() == 30);
  CHECK(data.unlabeled_y.cols() == 5);
  CHECK(data.labeled_x.rows() == 7);
  CHECK(data.labeled_y.rows() == 7);
  CHECK(data.latents_unlabeled.rows() == 30);
  CHECK(data.latents_labeled.cols() == 3);

  CHECK(data.unlabeled_x.columns.front() == "ch_000");
  CHECK(data.unlabeled_x.columns.back() == "ch_063");
  CHECK(data.unlabeled_y.columns.front() == "target_00");
  CHECK(data.unlabeled_y.columns.back() == "target_04");
  CHECK(data.labeled_x.columns == data.unlabeled_x.columns);
  CHECK(data.labeled_y.columns == data.unlabeled_y.columns);
}

TEST_CASE("generate_synthetic_spectra: same seed reproduces every value bit for bit") {
  const auto a = generate_synthetic_spectra(20, 5, 32, 4, 99, 0.02);
  const auto b = generate_synthetic_spectra(20, 5, 32, 4, 99, 0.02);
  CHECK(a.unlabeled_x.values == b.unlabeled_x.values);
  CHECK(a.unlabeled_y.values == b.unlabeled_y.values);
  CHECK(a.labeled_x.values == b.labeled_x.values);
  CHECK(a.labeled_y.values == b.labeled_y.values);
  CHECK(a.latents_unlabeled == b.latents_unlabeled);

  const auto c = generate_synthetic_spectra(20, 5, 32, 4, 100, 0.02);
  CHECK(a.unlabeled_x.values != c.unlabeled_x.values);
}

TEST_CASE("generate_synthetic_spectra: zero noise rows equal the documented generator") {
  const auto data = generate_synthetic_spectra(10, 3, 48, 6, 5, 0.0);
  for (Index i = 0; i < 10; ++i) {
    const RowVector u = data.latents_unlabeled.row(i);
    CHECK((data.unlabeled_x.values.row(i) - synth_spectrum(u, 48)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((data.unlabeled_y.values.row(i) - synth_targets(u, 6)).cwiseAbs().maxCoeff() == 0.0);
  }
  for (Index i = 0; i < 3; ++i) {
    const RowVector u = data.latents_labeled.row(i);
    CHECK((data.labeled_x.values.row(i) - synth_spectrum(u, 48)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("synth_targets: each target tracks its driving latent") {
  const auto data = generate_synthetic_spectra(400, 2, 16, 6, 8, 0.0);
  for (Index k = 0; k < 6; ++k) {
    const Vector target = data.unlabeled_y.values.col(k);
    const Vector drive = data.latents_unlabeled.col(k % 3);
    CHECK(correlation(target, drive) > 0.99);
  }
}

TEST_CASE("synth_spectrum: smooth, positive, latent-sensitive") {
  RowVector u(3);
  u << 0.2, 0.5, 0.8;
  const RowVector s = synth_spectrum(u, 256);
  CHECK(s.minCoeff() > 0.0);
  // Smoothness: adjacent channels never jump by more than a small step.
  for (Index c = 1; c < 256; ++c) CHECK(std::abs(s(c) - s(c - 1)) < 0.2);

  RowVector v(3);
  v << 0.8, 0.5, 0.2;
  CHECK((synth_spectrum(v, 256) - s).cwiseAbs().maxCoeff() > 0.01);

  RowVector bad(2);
  bad << 0.1, 0.2;
  CHECK_THROWS(synth_spectrum(bad, 64));
  CHECK_THROWS(synth_spectrum(u, 1));
  CHECK_THROWS(synth_targets(bad, 3));
  CHECK_THROWS(synth_targets(u, 0));
  CHECK_THROWS(generate_synthetic_spectra(0, 1));
  CHECK_THROWS(generate_synthetic_spectra(5, 5, 32, 3, 0, -0.1));
}

TEST_CASE("synth_targets: per-target scales cycle over decades") {
  RowVector u(3);
  u << 0.5, 0.5, 0.5;
  const RowVector y = synth_targets(u, 10);
  // Same latent drives targets 0 and 5 but scale jumps 1 -> 1000... pattern
  // {1, 10, 100, 0.1, 1000} repeating.
  CHECK(y(1) / y(0) == doctest::Approx(10.0));
  CHECK(y(2) / y(0) == doctest::Approx(100.0));
  CHECK(y(3) / y(0) == doctest::Approx(0.1));
  CHECK(y(4) / y(0) == doctest::Approx(1000.0));
  CHECK(y(5) / y(0) == doctest::Approx(1.0));
}

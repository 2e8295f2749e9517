#include <cmath>
#include <vector>

#include <doctest.h>

#include "topoproj/preprocess.hpp"
#include "topoproj/rng.hpp"

using namespace topoproj;

namespace {

Matrix column(std::initializer_list<Scalar> values) {
  Matrix m(static_cast<Index>(values.size()), 1);
  Index r = 0;
  for (const Scalar v : values) m(r++, 0) = v;
  return m;
}

}  // namespace

TEST_CASE("minmax: (0, 5, 10) maps to (0, 0.5, 1)") {
  const Matrix x = column({0, 5, 10});
  const auto n = fit_normalizer(x, NormalizerKind::kMinMax);
  const Matrix z = apply(n, x);
  CHECK(z(0, 0) == doctest::Approx(0.0));
  CHECK(z(1, 0) == doctest::Approx(0.5));
  CHECK(z(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("standard: (-1, 1) is already zero-mean unit-variance") {
  const Matrix x = column({-1, 1});
  const auto n = fit_normalizer(x, NormalizerKind::kStandard);
  const Matrix z = apply(n, x);
  CHECK(z(0, 0) == doctest::Approx(-1.0));
  CHECK(z(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("robust: (1, 2, 3, 4, 100) uses median 3 and interpolated IQR 2") {
  const Matrix x = column({1, 2, 3, 4, 100});
  const auto n = fit_normalizer(x, NormalizerKind::kRobust);
  CHECK(n.offset(0) == doctest::Approx(3.0));
  CHECK(n.scale(0) == doctest::Approx(2.0));  // q3 - q1 = 4 - 2
  const Matrix z = apply(n, x);
  CHECK(z(0, 0) == doctest::Approx(-1.0));
  CHECK(z(2, 0) == doctest::Approx(0.0));
  CHECK(z(4, 0) == doctest::Approx(48.5));
}

TEST_CASE("quantile: linear interpolation between order statistics") {
  const Vector v = column({1, 2, 3, 4, 100});
  CHECK(quantile(v, 0.25) == doctest::Approx(2.0));
  CHECK(quantile(v, 0.5) == doctest::Approx(3.0));
  CHECK(quantile(v, 0.75) == doctest::Approx(4.0));
  const Vector two = column({0, 10});
  CHECK(quantile(two, 0.5) == doctest::Approx(5.0));
  CHECK(quantile(two, 0.25) == doctest::Approx(2.5));
}

TEST_CASE("normalizers: constant feature maps to 0 and inverts exactly") {
  Matrix x(3, 2);
  x << 7, 1, 7, 2, 7, 3;
  for (const auto kind :
       {NormalizerKind::kMinMax, NormalizerKind::kStandard, NormalizerKind::kRobust}) {
    const auto n = fit_normalizer(x, kind);
    const Matrix z = apply(n, x);
    CHECK(z(0, 0) == 0.0);
    CHECK(z(1, 0) == 0.0);
    CHECK(z(2, 0) == 0.0);
    const Matrix back = inverse(n, z);
    CHECK(back(0, 0) == 7.0);
  }
}

TEST_CASE("normalizers: inverse(apply(x)) == x within 1e-9 for all kinds") {
  Rng rng(31);
  Matrix x(40, 6);
  for (Index r = 0; r < x.rows(); ++r)
    for (Index c = 0; c < x.cols(); ++c) x(r, c) = rng.uniform(-50.0, 50.0) * (c + 1);
  for (const auto kind :
       {NormalizerKind::kMinMax, NormalizerKind::kStandard, NormalizerKind::kRobust}) {
    const auto n = fit_normalizer(x, kind);
    const Matrix back = inverse(n, apply(n, x));
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("normalizer kind names round trip") {
  for (const auto kind :
       {NormalizerKind::kMinMax, NormalizerKind::kStandard, NormalizerKind::kRobust})
    CHECK(parse_normalizer_kind(to_string(kind)) == kind);
  CHECK_THROWS(parse_normalizer_kind("zscore"));
}

TEST_CASE("normalizer preconditions") {
  Matrix one_row(1, 2);
  one_row << 1, 2;
  CHECK_THROWS(fit_normalizer(one_row, NormalizerKind::kMinMax));

  Matrix with_nan(2, 1);
  with_nan << 1, std::nan("");
  CHECK_THROWS(fit_normalizer(with_nan, NormalizerKind::kMinMax));

  Normalizer unfitted;
  Matrix x(2, 1);
  x << 1, 2;
  CHECK_THROWS(apply(unfitted, x));
  CHECK_THROWS(inverse(unfitted, x));
}

TEST_CASE("pca: 1-D line embedded in 3-D keeps one component") {
  Matrix x(20, 3);
  for (Index r = 0; r < 20; ++r) {
    const Scalar t = static_cast<Scalar>(r);
    x.row(r) << t, 2 * t + 1, -t + 4;
  }
  const auto p = fit_pca(x, 0.8);
  CHECK(p.k == 1);
  CHECK(p.explained_fraction == doctest::Approx(1.0));
}

TEST_CASE("pca: isotropic 3-D cloud at threshold 1.0 keeps all three") {
  Rng rng(17);
  Matrix x(500, 3);
  for (Index r = 0; r < x.rows(); ++r)
    for (Index c = 0; c < 3; ++c) x(r, c) = rng.normal();
  const auto p = fit_pca(x, 1.0);
  CHECK(p.k == 3);
}

TEST_CASE("pca: rank-5 factor model in 50-D recovers k = 5 at threshold 0.999") {
  Rng rng(23);
  const Index n = 300, dim = 50, rank = 5;
  Matrix factors(n, rank), loadings(rank, dim);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < rank; ++c) factors(r, c) = rng.normal();
  for (Index r = 0; r < rank; ++r)
    for (Index c = 0; c < dim; ++c) loadings(r, c) = rng.normal();
  const Matrix x = factors * loadings;

  const auto p = fit_pca(x, 0.999);
  CHECK(p.k == 5);

  // Components orthonormal within 1e-9.
  const Matrix gram = p.components * p.components.transpose();
  CHECK((gram - Matrix::Identity(p.k, p.k)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("pca: explained fraction equals top-k eigenvalue share of the trace") {
  Rng rng(29);
  Matrix x(120, 8);
  for (Index r = 0; r < x.rows(); ++r)
    for (Index c = 0; c < x.cols(); ++c) x(r, c) = rng.normal() * (c + 1);

  const auto p = fit_pca(x, 0.7);
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<Scalar>(x.rows() - 1);
  const Scalar share = p.eigenvalues.head(p.k).sum() / cov.trace();
  CHECK(p.explained_fraction == doctest::Approx(share).epsilon(1e-9));
  CHECK(p.explained_fraction >= 0.7);
}

TEST_CASE("pca: reconstruction error is non-increasing in k") {
  Rng rng(41);
  Matrix x(100, 10);
  for (Index r = 0; r < x.rows(); ++r)
    for (Index c = 0; c < x.cols(); ++c) x(r, c) = rng.normal() * (1.0 + (c % 4));

  Scalar previous = -1.0;
  Index previous_k = 0;
  for (const Scalar threshold : {0.3, 0.6, 0.9, 1.0}) {
    const auto p = fit_pca(x, threshold);
    const Matrix scores = project(p, x);
    const Matrix reconstructed = (scores * p.components).rowwise() + p.mean;
    const Scalar err = (reconstructed - x).norm();
    if (previous >= 0.0 && p.k >= previous_k) CHECK(err <= previous + 1e-9);
    previous = err;
    previous_k = p.k;
  }
}

TEST_CASE("pca: threshold outside (0, 1] rejected") {
  Matrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  CHECK_THROWS(fit_pca(x, 0.0));
  CHECK_THROWS(fit_pca(x, 1.5));
  CHECK_THROWS(fit_pca(x, -0.1));
}

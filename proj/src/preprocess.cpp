#include "topoproj/preprocess.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace topoproj {

std::string to_string(NormalizerKind kind) {
  switch (kind) {
    case NormalizerKind::kMinMax: return "minmax";
    case NormalizerKind::kStandard: return "standard";
    case NormalizerKind::kRobust: return "robust";
  }
  throw std::logic_error("to_string: unknown NormalizerKind");
}

NormalizerKind parse_normalizer_kind(const std::string& name) {
  if (name == "minmax") return NormalizerKind::kMinMax;
  if (name == "standard") return NormalizerKind::kStandard;
  if (name == "robust") return NormalizerKind::kRobust;
  throw std::invalid_argument("unknown normalizer '" + name + "' (expected minmax|standard|robust)");
}

Scalar quantile(const Eigen::Ref<const Vector>& column, Scalar p) {
  if (column.size() == 0) throw std::invalid_argument("quantile: empty column");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p must be in [0, 1]");
  std::vector<Scalar> sorted(column.data(), column.data() + column.size());
  std::sort(sorted.begin(), sorted.end());
  const Scalar pos = p * static_cast<Scalar>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const Scalar frac = pos - static_cast<Scalar>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Normalizer fit_normalizer(const Eigen::Ref<const Matrix>& x, NormalizerKind kind) {
  if (x.rows() < 2) throw std::invalid_argument("fit_normalizer: need at least 2 rows");
  if (!x.allFinite()) throw std::invalid_argument("fit_normalizer: non-finite input");

  Normalizer n;
  n.kind = kind;
  n.offset.resize(x.cols());
  n.scale.resize(x.cols());

  switch (kind) {
    case NormalizerKind::kMinMax:
      n.offset = x.colwise().minCoeff();
      n.scale = x.colwise().maxCoeff() - x.colwise().minCoeff();
      break;
    case NormalizerKind::kStandard: {
      n.offset = x.colwise().mean();
      const Matrix centered = x.rowwise() - n.offset;
      n.scale = (centered.array().square().colwise().mean()).sqrt();
      break;
    }
    case NormalizerKind::kRobust:
      for (Index j = 0; j < x.cols(); ++j) {
        n.offset(j) = quantile(x.col(j), 0.5);
        n.scale(j) = quantile(x.col(j), 0.75) - quantile(x.col(j), 0.25);
      }
      break;
  }
  // Constant (or zero-spread) features map to 0 and invert exactly.
  for (Index j = 0; j < n.scale.size(); ++j)
    if (n.scale(j) <= 0.0) n.scale(j) = 1.0;
  return n;
}

namespace {

void check_applicable(const Normalizer& n, const Eigen::Ref<const Matrix>& x, const char* op) {
  if (!n.fitted()) throw std::logic_error(std::string(op) + ": normalizer is not fitted");
  if (x.cols() != n.offset.size())
    throw std::invalid_argument(std::string(op) + ": expected " + std::to_string(n.offset.size()) +
                                " features, got " + std::to_string(x.cols()));
}

}  // namespace

Matrix apply(const Normalizer& n, const Eigen::Ref<const Matrix>& x) {
  check_applicable(n, x, "apply");
  return (x.rowwise() - n.offset).array().rowwise() / n.scale.array();
}

Matrix inverse(const Normalizer& n, const Eigen::Ref<const Matrix>& x) {
  check_applicable(n, x, "inverse");
  return (x.array().rowwise() * n.scale.array()).rowwise() + n.offset.array();
}

PcaModel fit_pca(const Eigen::Ref<const Matrix>& x, Scalar threshold) {
  if (x.rows() < 2) throw std::invalid_argument("fit_pca: need at least 2 rows");
  if (threshold <= 0.0 || threshold > 1.0)
    throw std::invalid_argument("fit_pca: threshold must be in (0, 1]");

  PcaModel p;
  p.mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - p.mean;
  const Matrix cov = centered.transpose() * centered / static_cast<Scalar>(x.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("fit_pca: eigendecomposition failed");

  // Solver orders eigenvalues ascending; flip to descending and clamp the
  // tiny negatives that round-off produces on rank-deficient inputs.
  const Index dim = x.cols();
  p.eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
  Matrix basis(dim, dim);
  for (Index i = 0; i < dim; ++i) basis.row(i) = solver.eigenvectors().col(dim - 1 - i).transpose();

  // Fix each component's sign so the entry of largest magnitude is positive;
  // keeps serialized models stable across reruns.
  for (Index i = 0; i < dim; ++i) {
    Index arg = 0;
    basis.row(i).cwiseAbs().maxCoeff(&arg);
    if (basis(i, arg) < 0.0) basis.row(i) = -basis.row(i);
  }

  const Scalar total = p.eigenvalues.sum();
  Index k = dim;
  if (total > 0.0) {
    Scalar cumulative = 0.0;
    for (Index i = 0; i < dim; ++i) {
      cumulative += p.eigenvalues(i);
      if (cumulative / total >= threshold) {
        k = i + 1;
        break;
      }
    }
    p.explained_fraction = p.eigenvalues.head(k).sum() / total;
  } else {
    // Zero-variance data: keep one component, which explains all of nothing.
    k = 1;
    p.explained_fraction = 1.0;
  }
  p.k = k;
  p.components = basis.topRows(k);
  return p;
}

Matrix project(const PcaModel& p, const Eigen::Ref<const Matrix>& x) {
  if (x.cols() != p.mean.size())
    throw std::invalid_argument("project: expected " + std::to_string(p.mean.size()) +
                                " features, got " + std::to_string(x.cols()));
  return (x.rowwise() - p.mean) * p.components.transpose();
}

}  // namespace topoproj

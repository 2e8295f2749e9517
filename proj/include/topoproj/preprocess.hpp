#pragma once

#include <string>

#include "topoproj/types.hpp"

namespace topoproj {

enum class NormalizerKind { kMinMax, kStandard, kRobust };

std::string to_string(NormalizerKind kind);
NormalizerKind parse_normalizer_kind(const std::string& name);

/// Per-feature affine rescaling fitted on training features: minmax maps
/// min->0 / max->1, standard subtracts the mean and divides by the population
/// standard deviation, robust subtracts the median and divides by the IQR.
/// A constant feature gets scale 1 so it normalizes to exactly 0 and inverts
/// exactly.
struct Normalizer {
  NormalizerKind kind = NormalizerKind::kMinMax;
  RowVector offset;  // per-feature center: min | mean | median
  RowVector scale;   // per-feature divisor: range | std | IQR (1 when degenerate)

  bool fitted() const { return offset.size() > 0; }
};

Normalizer fit_normalizer(const Eigen::Ref<const Matrix>& x, NormalizerKind kind);
Matrix apply(const Normalizer& n, const Eigen::Ref<const Matrix>& x);
Matrix inverse(const Normalizer& n, const Eigen::Ref<const Matrix>& x);

/// Linear-interpolation quantile of the values in `column` (the convention
/// where the p-quantile sits at fractional position p*(n-1) between order
/// statistics). Stated explicitly because quartile conventions differ.
Scalar quantile(const Eigen::Ref<const Vector>& column, Scalar p);

/// Principal components of the training features: eigendecomposition of the
/// sample covariance, components stored row-wise in descending-variance order.
struct PcaModel {
  RowVector mean;
  Matrix components;   // k x dim, rows orthonormal
  Vector eigenvalues;  // all dim eigenvalues, descending, clamped at 0
  Scalar explained_fraction = 0;
  Index k = 0;
};

/// Keeps the smallest k whose cumulative explained variance reaches
/// `threshold` (in (0, 1]).
PcaModel fit_pca(const Eigen::Ref<const Matrix>& x, Scalar threshold);
Matrix project(const PcaModel& p, const Eigen::Ref<const Matrix>& x);

}  // namespace topoproj

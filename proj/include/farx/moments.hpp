#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "farx/error.hpp"
#include "farx/grid.hpp"

namespace farx {

/// n time-ordered curves sampled on a shared grid. Row t of `curves()` is
/// the curve observed in period t.
template <typename Scalar = double>
class FunctionalSample {
 public:
  using Matrix = MatrixX<Scalar>;
  using GridType = QuadratureGrid<Scalar>;

  FunctionalSample(GridType grid, Matrix curves) : grid_(std::move(grid)), curves_(std::move(curves)) {
    if (curves_.cols() != grid_.size())
      throw DimensionError("sample has " + std::to_string(curves_.cols()) +
                           " columns, grid has " + std::to_string(grid_.size()) + " points");
    if (curves_.rows() < 2) throw InsufficientDataError("a functional sample needs at least 2 curves");
    if (!curves_.allFinite()) throw DataError("sample contains non-finite values");
  }

  Eigen::Index length() const noexcept { return curves_.rows(); }
  Eigen::Index grid_size() const noexcept { return curves_.cols(); }
  const GridType& grid() const noexcept { return grid_; }
  const Matrix& curves() const noexcept { return curves_; }
  auto curve(Eigen::Index t) const { return curves_.row(t).transpose(); }

  /// Contiguous sub-sample [begin, begin + count).
  FunctionalSample slice(Eigen::Index begin, Eigen::Index count) const {
    if (begin < 0 || count < 0 || begin + count > length())
      throw ArgumentError("slice out of range");
    return FunctionalSample(grid_, curves_.middleRows(begin, count));
  }

 private:
  GridType grid_;
  Matrix curves_;
};

using Sample = FunctionalSample<double>;

template <typename Scalar = double>
struct RawMoments {
  MatrixX<Scalar> c0;    // (1/n) sum (x_t - m)(x_t - m)^T
  MatrixX<Scalar> c1;    // (1/(n-1)) sum (x_{t+1} - m)(x_t - m)^T
  VectorX<Scalar> mean;  // full-sample mean curve m
};

/// Moments conjugated by W^{1/2}, so that Euclidean algebra on them matches
/// the L2 geometry of the grid.
template <typename Scalar = double>
struct WeightedMomentPair {
  MatrixX<Scalar> c0_tilde;
  MatrixX<Scalar> c1_tilde;
  VectorX<Scalar> mean_curve;
  QuadratureGrid<Scalar> grid;
  Eigen::Index sample_size = 0;
};

enum class EstimatorKind { fpca, tikhonov };

inline const char* to_string(EstimatorKind k) { return k == EstimatorKind::fpca ? "fpca" : "tikhonov"; }

struct TuningRecord {
  std::optional<double> tau;
  std::optional<int> k;
  std::optional<double> alpha;
};

/// Kernel matrix with entry (i, j) estimating psi(u_i, u_j). Applied to a
/// curve by trapezoidal quadrature over the second argument.
template <typename Scalar = double>
struct OperatorEstimate {
  MatrixX<Scalar> kernel;
  QuadratureGrid<Scalar> grid;
  EstimatorKind method = EstimatorKind::tikhonov;
  TuningRecord tuning;
};

using Operator = OperatorEstimate<double>;

/// Centered covariance and lag-one cross-covariance about the full-sample
/// mean, with divisors n and n - 1.
template <typename Scalar>
RawMoments<Scalar> sample_moments(const FunctionalSample<Scalar>& sample) {
  const Eigen::Index n = sample.length();
  if (n < 2) throw InsufficientDataError("moments need at least 2 curves");
  RawMoments<Scalar> out;
  out.mean = sample.curves().colwise().mean().transpose();
  const MatrixX<Scalar> centered = sample.curves().rowwise() - out.mean.transpose();
  MatrixX<Scalar> c0 = centered.transpose() * centered / Scalar(n);
  out.c0 = (c0 + c0.transpose()) / Scalar(2);
  out.c1 = centered.bottomRows(n - 1).transpose() * centered.topRows(n - 1) / Scalar(n - 1);
  return out;
}

template <typename Scalar>
WeightedMomentPair<Scalar> to_weighted(const RawMoments<Scalar>& raw, const QuadratureGrid<Scalar>& grid,
                                       Eigen::Index sample_size = 0) {
  const Eigen::Index m = grid.size();
  if (raw.c0.rows() != m || raw.c0.cols() != m || raw.c1.rows() != m || raw.c1.cols() != m ||
      raw.mean.size() != m)
    throw DimensionError("to_weighted: moment matrices do not match grid size " + std::to_string(m));
  const auto& s = grid.sqrt_weights();
  WeightedMomentPair<Scalar> out{s.asDiagonal() * raw.c0 * s.asDiagonal(),
                                 s.asDiagonal() * raw.c1 * s.asDiagonal(), raw.mean, grid, sample_size};
  return out;
}

template <typename Scalar>
WeightedMomentPair<Scalar> weighted_moments(const FunctionalSample<Scalar>& sample) {
  return to_weighted(sample_moments(sample), sample.grid(), sample.length());
}

/// (Psi x)(u_i) = sum_j kernel(i, j) x(u_j) w_j
template <typename Scalar, typename Derived>
VectorX<Scalar> apply_kernel(const OperatorEstimate<Scalar>& op, const Eigen::MatrixBase<Derived>& x) {
  require_on_grid(x, op.grid, "apply_kernel");
  return op.kernel * (op.grid.weights().array() * x.derived().array()).matrix();
}

/// apply_kernel to every row of `curves` (one curve per row).
template <typename Scalar>
MatrixX<Scalar> apply_kernel_rows(const OperatorEstimate<Scalar>& op, const MatrixX<Scalar>& curves) {
  if (curves.cols() != op.grid.size()) throw DimensionError("apply_kernel_rows: grid mismatch");
  return curves * op.grid.weights().asDiagonal() * op.kernel.transpose();
}

/// W^{-1/2} K W^{-1/2}: the kernel on the grid from its weighted-space matrix.
template <typename Scalar>
MatrixX<Scalar> unweight_matrix(const MatrixX<Scalar>& weighted, const QuadratureGrid<Scalar>& grid) {
  const Eigen::Index m = grid.size();
  if (weighted.rows() != m || weighted.cols() != m)
    throw DimensionError("unweight_kernel: matrix does not match grid");
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(grid.weights()(i) > Scalar(0))) throw InvalidGridError("unweight_kernel: non-positive weight");
  const VectorX<Scalar> inv = grid.sqrt_weights().cwiseInverse();
  return inv.asDiagonal() * weighted * inv.asDiagonal();
}

/// W^{1/2} K W^{1/2}; inverse of unweight_matrix.
template <typename Scalar>
MatrixX<Scalar> weight_matrix(const MatrixX<Scalar>& kernel, const QuadratureGrid<Scalar>& grid) {
  if (kernel.rows() != grid.size() || kernel.cols() != grid.size())
    throw DimensionError("weight_matrix: matrix does not match grid");
  return grid.sqrt_weights().asDiagonal() * kernel * grid.sqrt_weights().asDiagonal();
}

template <typename Scalar>
OperatorEstimate<Scalar> unweight_kernel(const MatrixX<Scalar>& weighted, const QuadratureGrid<Scalar>& grid,
                                         EstimatorKind method = EstimatorKind::tikhonov,
                                         TuningRecord tuning = {}) {
  OperatorEstimate<Scalar> op{unweight_matrix(weighted, grid), grid, method, tuning};
  if (!op.kernel.allFinite()) throw NumericalError("unweight_kernel: non-finite kernel entries");
  return op;
}

}  // namespace farx

#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "farx/error.hpp"

namespace farx {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Evaluation points on an interval together with trapezoidal integration
/// weights. Immutable once built; every L2 computation in the library goes
/// through one of these.
template <typename Scalar = double>
class QuadratureGrid {
 public:
  using Vector = VectorX<Scalar>;

  /// Trapezoidal weights for strictly increasing `points`:
  /// interior w_i = (u_{i+1} - u_{i-1}) / 2, endpoints get half a cell.
  static QuadratureGrid trapezoid(const Vector& points) {
    const Eigen::Index m = points.size();
    if (m < 2) throw InvalidGridError("grid needs at least 2 points");
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!std::isfinite(static_cast<double>(points(i))))
        throw InvalidGridError("grid point " + std::to_string(i) + " is not finite");
      if (i > 0 && !(points(i) > points(i - 1)))
        throw InvalidGridError("grid points must be strictly increasing (index " +
                               std::to_string(i) + ")");
    }
    Vector w(m);
    w(0) = (points(1) - points(0)) / Scalar(2);
    w(m - 1) = (points(m - 1) - points(m - 2)) / Scalar(2);
    for (Eigen::Index i = 1; i + 1 < m; ++i) w(i) = (points(i + 1) - points(i - 1)) / Scalar(2);
    return QuadratureGrid(points, std::move(w));
  }

  /// Uniform grid of `m` points on [0, 1], endpoints included.
  static QuadratureGrid uniform(Eigen::Index m) {
    if (m < 2) throw InvalidGridError("grid needs at least 2 points");
    Vector p(m);
    for (Eigen::Index i = 0; i < m; ++i) p(i) = Scalar(i) / Scalar(m - 1);
    p(m - 1) = Scalar(1);
    return trapezoid(p);
  }

  /// Grid with caller-supplied weights (e.g. unit weights for testing the
  /// unweighted algebra). Weights must be strictly positive.
  static QuadratureGrid with_weights(const Vector& points, const Vector& weights) {
    if (points.size() < 2) throw InvalidGridError("grid needs at least 2 points");
    if (points.size() != weights.size())
      throw InvalidGridError("points and weights differ in length");
    for (Eigen::Index i = 1; i < points.size(); ++i)
      if (!(points(i) > points(i - 1)))
        throw InvalidGridError("grid points must be strictly increasing");
    for (Eigen::Index i = 0; i < weights.size(); ++i)
      if (!(weights(i) > Scalar(0)) || !std::isfinite(static_cast<double>(weights(i))))
        throw InvalidGridError("grid weights must be positive and finite");
    return QuadratureGrid(points, weights);
  }

  Eigen::Index size() const noexcept { return points_.size(); }
  const Vector& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }
  const Vector& sqrt_weights() const noexcept { return sqrt_weights_; }
  Scalar span() const { return points_(size() - 1) - points_(0); }

  bool operator==(const QuadratureGrid& other) const {
    return size() == other.size() && points_ == other.points_ && weights_ == other.weights_;
  }
  bool operator!=(const QuadratureGrid& other) const { return !(*this == other); }

 private:
  QuadratureGrid(Vector points, Vector weights)
      : points_(std::move(points)),
        weights_(std::move(weights)),
        sqrt_weights_(weights_.array().sqrt().matrix()) {}

  Vector points_;
  Vector weights_;
  Vector sqrt_weights_;
};

using Grid = QuadratureGrid<double>;

template <typename Scalar>
void require_same_grid(const QuadratureGrid<Scalar>& a, const QuadratureGrid<Scalar>& b,
                       const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": grids differ");
}

template <typename Scalar, typename Derived>
void require_on_grid(const Eigen::MatrixBase<Derived>& f, const QuadratureGrid<Scalar>& grid,
                     const char* what) {
  if (f.size() != grid.size())
    throw DimensionError(std::string(what) + ": curve has " + std::to_string(f.size()) +
                         " values, grid has " + std::to_string(grid.size()));
}

/// Quadrature approximation of the L2 inner product: sum_i w_i f_i g_i.
template <typename Scalar, typename DerivedF, typename DerivedG>
Scalar inner_product(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g,
                     const QuadratureGrid<Scalar>& grid) {
  require_on_grid(f, grid, "inner_product");
  require_on_grid(g, grid, "inner_product");
  return (f.derived().array() * g.derived().array() * grid.weights().array()).sum();
}

template <typename Scalar, typename Derived>
Scalar squared_l2_norm(const Eigen::MatrixBase<Derived>& f, const QuadratureGrid<Scalar>& grid) {
  return inner_product(f, f, grid);
}

template <typename Scalar, typename Derived>
Scalar l2_norm(const Eigen::MatrixBase<Derived>& f, const QuadratureGrid<Scalar>& grid) {
  using std::sqrt;
  return sqrt(squared_l2_norm(f, grid));
}

}  // namespace farx

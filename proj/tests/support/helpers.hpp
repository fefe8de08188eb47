#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "farx/grid.hpp"
#include "farx/moments.hpp"

namespace testing {

inline double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n01(gen);
  return m;
}

inline Eigen::MatrixXd random_psd(Eigen::Index m, std::uint64_t seed) {
  const Eigen::MatrixXd a = random_matrix(m, m + 3, seed);
  return a * a.transpose() / double(m);
}

/// Sample whose curves are all multiples of one function, with the
/// multipliers following a scalar AR(1).
inline farx::Sample scalar_ar1_sample(int n, double coef, int m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  const farx::Grid grid = farx::Grid::uniform(m);
  Eigen::VectorXd shape(m);
  for (int i = 0; i < m; ++i) shape(i) = std::sqrt(2.0) * std::sin(2.0 * M_PI * grid.points()(i));
  Eigen::MatrixXd curves(n, m);
  double x = 0.0;
  for (int t = 0; t < 200; ++t) x = coef * x + n01(gen);
  for (int t = 0; t < n; ++t) {
    x = coef * x + n01(gen);
    curves.row(t) = x * shape.transpose();
  }
  return farx::Sample(grid, curves);
}

}  // namespace testing

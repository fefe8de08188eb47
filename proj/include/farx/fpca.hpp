#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "farx/error.hpp"
#include "farx/grid.hpp"
#include "farx/moments.hpp"

namespace farx {

/// Eigenpairs of a weighted covariance, largest eigenvalue first.
/// Columns of `eigenvectors` are Euclidean-orthonormal in weighted space.
template <typename Scalar = double>
struct SpectralDecomposition {
  VectorX<Scalar> eigenvalues;
  MatrixX<Scalar> eigenvectors;
  QuadratureGrid<Scalar> grid;

  Eigen::Index size() const noexcept { return eigenvalues.size(); }

  /// phi_k = W^{-1/2} v_k for the leading `k` eigenvectors (unit L2 norm
  /// under the grid's quadrature).
  MatrixX<Scalar> eigenfunctions(Eigen::Index k) const {
    return grid.sqrt_weights().cwiseInverse().asDiagonal() * eigenvectors.leftCols(k);
  }
};

/// Symmetric eigendecomposition, sorted nonincreasing. Eigenvalues in
/// [-1e-10 * scale, 0) are clamped to zero; anything more negative is
/// treated as a bug upstream.
template <typename Scalar>
SpectralDecomposition<Scalar> eigendecompose(const MatrixX<Scalar>& c0_tilde, const QuadratureGrid<Scalar>& grid) {
  const Eigen::Index m = c0_tilde.rows();
  if (c0_tilde.cols() != m || m != grid.size())
    throw DimensionError("eigendecompose: matrix does not match grid");
  if (!c0_tilde.allFinite()) throw NumericalError("eigendecompose: non-finite covariance");
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(c0_tilde);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecompose: eigensolver did not converge");

  // Eigen returns ascending order.
  SpectralDecomposition<Scalar> out{solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse(),
                                    grid};
  const Scalar scale = out.eigenvalues.cwiseAbs().maxCoeff();
  const Scalar floor = Scalar(-1e-10) * scale;
  for (Eigen::Index k = 0; k < m; ++k) {
    Scalar& lam = out.eigenvalues(k);
    if (lam < floor)
      throw NumericalError("eigendecompose: covariance has eigenvalue " + std::to_string(double(lam)) +
                           " below the PSD tolerance");
    if (lam < Scalar(0)) lam = Scalar(0);
  }
  return out;
}

template <typename Scalar>
SpectralDecomposition<Scalar> eigendecompose(const WeightedMomentPair<Scalar>& moments) {
  return eigendecompose(moments.c0_tilde, moments.grid);
}

/// Smallest k whose cumulative eigenvalue share reaches tau.
template <typename Scalar>
int select_k(const VectorX<Scalar>& eigenvalues, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("select_k: tau must lie in (0, 1]");
  if (eigenvalues.size() == 0) throw DegenerateSpectrumError("select_k: empty spectrum");
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) < Scalar(0)) throw ArgumentError("select_k: negative eigenvalue");
    if (i > 0 && eigenvalues(i) > eigenvalues(i - 1))
      throw ArgumentError("select_k: eigenvalues must be nonincreasing");
  }
  // Cumulative sums in one pass so the final partial sum equals the total bitwise.
  VectorX<Scalar> cumulative(eigenvalues.size());
  Scalar running(0);
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) cumulative(i) = running += eigenvalues(i);
  const Scalar total = running;
  if (!(total > Scalar(0))) throw DegenerateSpectrumError("select_k: all eigenvalues are zero");
  for (Eigen::Index i = 0; i < cumulative.size(); ++i)
    if (cumulative(i) / total >= Scalar(tau)) return static_cast<int>(i + 1);
  return static_cast<int>(eigenvalues.size());
}

/// Either a cumulative-variance threshold or an explicit component count.
struct Truncation {
  static Truncation threshold(double tau) { return Truncation{tau, std::nullopt}; }
  static Truncation components(int k) { return Truncation{std::nullopt, k}; }
  std::optional<double> tau;
  std::optional<int> k;
};

/// Intermediate quantities of an FPCA-FAR fit, kept for diagnostics.
template <typename Scalar = double>
struct FpcaFit {
  OperatorEstimate<Scalar> estimate;
  SpectralDecomposition<Scalar> spectrum;
  MatrixX<Scalar> eigenfunctions;  // M x K, columns phi_k on the grid
  MatrixX<Scalar> scores;          // n x K
  MatrixX<Scalar> coefficient;     // K x K, xi_{t+1} ~= coefficient * xi_t
  int k = 0;
};

/// Score-space VAR(1) by least squares. Returns the K x K matrix B with
/// xi_{t+1} ~= B xi_t, i.e. the transpose of
/// (sum xi_t xi_t^T)^{-1} (sum xi_t xi_{t+1}^T).
template <typename Scalar>
MatrixX<Scalar> fit_score_var(const MatrixX<Scalar>& scores) {
  const Eigen::Index n = scores.rows();
  const Eigen::Index k = scores.cols();
  if (n < k + 2)
    throw InsufficientDataError("score VAR needs n >= K + 2 (n = " + std::to_string(n) +
                                ", K = " + std::to_string(k) + ")");
  const auto lead = scores.topRows(n - 1);
  const auto next = scores.bottomRows(n - 1);
  MatrixX<Scalar> gram = lead.transpose() * lead;
  gram = (gram + gram.transpose()) / Scalar(2);
  const MatrixX<Scalar> cross = lead.transpose() * next;

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(gram, Eigen::EigenvaluesOnly);
  const Scalar lo = solver.eigenvalues()(0);
  const Scalar hi = solver.eigenvalues()(k - 1);
  if (!(lo > Scalar(0)) || hi / lo > Scalar(1e12))
    throw SingularSystemError("score Gram matrix is singular (condition number " +
                              std::to_string(double(lo > Scalar(0) ? hi / lo : INFINITY)) + ")");
  const MatrixX<Scalar> printed = gram.ldlt().solve(cross);
  return printed.transpose();
}

template <typename Scalar>
FpcaFit<Scalar> fpca_far_fit_detailed(const FunctionalSample<Scalar>& sample, Truncation truncation) {
  const auto moments = weighted_moments(sample);
  auto spectrum = eigendecompose(moments);
  const Eigen::Index m = sample.grid_size();

  int k = 0;
  TuningRecord tuning;
  if (truncation.tau) {
    k = select_k(spectrum.eigenvalues, *truncation.tau);
    tuning.tau = truncation.tau;
  } else if (truncation.k) {
    k = *truncation.k;
  } else {
    throw ArgumentError("fpca_far_fit: truncation needs tau or K");
  }
  if (k < 1 || k > m) throw ArgumentError("fpca_far_fit: K must lie in [1, M]");
  tuning.k = k;

  MatrixX<Scalar> phi = spectrum.eigenfunctions(k);
  const MatrixX<Scalar> centered = sample.curves().rowwise() - moments.mean_curve.transpose();
  MatrixX<Scalar> scores = centered * sample.grid().weights().asDiagonal() * phi;
  MatrixX<Scalar> coefficient = fit_score_var(scores);

  // psi(u_i, u_j) = sum_{a,b} B_{ab} phi_a(u_i) phi_b(u_j)
  MatrixX<Scalar> kernel = phi * coefficient * phi.transpose();
  if (!kernel.allFinite()) throw NumericalError("fpca_far_fit: non-finite kernel");
  return FpcaFit<Scalar>{OperatorEstimate<Scalar>{std::move(kernel), sample.grid(), EstimatorKind::fpca, tuning},
                         std::move(spectrum), std::move(phi), std::move(scores), std::move(coefficient), k};
}

template <typename Scalar>
OperatorEstimate<Scalar> fpca_far_fit(const FunctionalSample<Scalar>& sample, Truncation truncation) {
  return fpca_far_fit_detailed(sample, truncation).estimate;
}

}  // namespace farx

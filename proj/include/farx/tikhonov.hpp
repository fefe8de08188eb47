#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "farx/error.hpp"
#include "farx/fpca.hpp"
#include "farx/grid.hpp"
#include "farx/moments.hpp"

namespace farx {

enum class AlphaGridKind { default_grid, eigenvalue_scaled, application };

inline const char* to_string(AlphaGridKind k) {
  switch (k) {
    case AlphaGridKind::default_grid: return "default";
    case AlphaGridKind::eigenvalue_scaled: return "eigenvalue-scaled";
    case AlphaGridKind::application: return "application";
  }
  return "unknown";
}

/// Candidate regularization strengths, strictly increasing and positive.
struct AlphaGrid {
  std::vector<double> values;
  AlphaGridKind kind = AlphaGridKind::default_grid;

  static AlphaGrid from_values(std::vector<double> values, AlphaGridKind kind = AlphaGridKind::default_grid) {
    if (values.empty()) throw ArgumentError("alpha grid is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0.0) || !std::isfinite(values[i])) throw ArgumentError("alpha values must be positive");
      if (i > 0 && !(values[i] > values[i - 1])) throw ArgumentError("alpha values must be strictly increasing");
    }
    return AlphaGrid{std::move(values), kind};
  }
};

/// `count` values log-spaced from lo to hi inclusive (as decimal exponents).
inline std::vector<double> log_spaced(double scale, double lo_exp, double hi_exp, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int l = 0; l < count; ++l) {
    const double e = lo_exp + (hi_exp - lo_exp) * double(l) / double(count - 1);
    out[static_cast<std::size_t>(l)] = scale * std::pow(10.0, e);
  }
  return out;
}

/// 25 values from 1e-5 * scale to scale, five decades.
inline AlphaGrid default_alpha_grid(double scale = 1.0) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("alpha grid scale must be positive");
  return AlphaGrid::from_values(log_spaced(scale, -5.0, 0.0, 25),
                                scale == 1.0 ? AlphaGridKind::default_grid : AlphaGridKind::eigenvalue_scaled);
}

/// 30 values from 1e-4 * lambda1 to 10 * lambda1.
inline AlphaGrid application_alpha_grid(double lambda1) {
  if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) throw ArgumentError("leading eigenvalue must be positive");
  return AlphaGrid::from_values(log_spaced(lambda1, -4.0, 1.0, 30), AlphaGridKind::application);
}

/// Weighted-space estimator C1~ Q diag(1/(lambda + alpha)) Q^T.
template <typename Scalar>
MatrixX<Scalar> tikhonov_weighted(const MatrixX<Scalar>& c1_tilde, const SpectralDecomposition<Scalar>& spectrum,
                                  Scalar alpha) {
  if (!(alpha > Scalar(0))) throw ArgumentError("tikhonov: alpha must be positive");
  const auto& q = spectrum.eigenvectors;
  const VectorX<Scalar> inv = (spectrum.eigenvalues.array() + alpha).inverse().matrix();
  return (c1_tilde * q) * inv.asDiagonal() * q.transpose();
}

template <typename Scalar>
OperatorEstimate<Scalar> tikhonov_fit(const WeightedMomentPair<Scalar>& moments,
                                      const SpectralDecomposition<Scalar>& spectrum, Scalar alpha) {
  TuningRecord tuning;
  tuning.alpha = static_cast<double>(alpha);
  return unweight_kernel(tikhonov_weighted(moments.c1_tilde, spectrum, alpha), moments.grid, EstimatorKind::tikhonov,
                         tuning);
}

template <typename Scalar>
OperatorEstimate<Scalar> tikhonov_fit(const WeightedMomentPair<Scalar>& moments, Scalar alpha) {
  if (!(alpha > Scalar(0))) throw ArgumentError("tikhonov: alpha must be positive");
  return tikhonov_fit(moments, eigendecompose(moments), alpha);
}

template <typename Scalar>
OperatorEstimate<Scalar> tikhonov_fit(const FunctionalSample<Scalar>& sample, Scalar alpha) {
  return tikhonov_fit(weighted_moments(sample), alpha);
}

// ---------------------------------------------------------------------------
// Cross-validated alpha selection

struct CvScheme {
  enum class Kind { holdout, forward_folds };
  Kind kind = Kind::holdout;
  int folds = 5;

  static CvScheme holdout() { return CvScheme{Kind::holdout, 0}; }
  static CvScheme forward(int k) { return CvScheme{Kind::forward_folds, k}; }
};

/// Which computation produces CV(alpha). `fast` uses one eigendecomposition
/// per training block; `naive` does a dense solve per alpha.
enum class CvPath { fast, naive };

/// One training/validation split. Indices are 0-based, half-open.
/// Training uses curves [0, train_end); targets are [target_begin,
/// target_end), each predicted from its predecessor.
struct CvFold {
  Eigen::Index train_end = 0;
  Eigen::Index target_begin = 0;
  Eigen::Index target_end = 0;
};

struct CvPoint {
  double alpha = 0.0;
  double loss = 0.0;
};

struct CvResult {
  double selected_alpha = 0.0;
  std::vector<CvPoint> curve;
  std::vector<CvFold> folds;
};

/// n_v = max(floor(0.2 n), 20); the last training curve supplies the lag
/// of the first validation target.
inline std::vector<CvFold> holdout_split(Eigen::Index n) {
  if (n < 30) throw InsufficientDataError("holdout CV needs n >= 30 (n = " + std::to_string(n) + ")");
  const Eigen::Index nv = std::max<Eigen::Index>(n / 5, 20);
  return {CvFold{n - nv, n - nv, n}};
}

/// k contiguous chronological folds of floor(n / (k + 1)) curves each; the
/// leading remainder is only ever used for training.
inline std::vector<CvFold> forward_split(Eigen::Index n, int k) {
  if (k < 1) throw ArgumentError("forward CV needs at least one fold");
  if (n < 5 * k + 10)
    throw InsufficientDataError("forward CV with " + std::to_string(k) + " folds needs n >= " +
                                std::to_string(5 * k + 10));
  const Eigen::Index size = n / (k + 1);
  const Eigen::Index first = n - k * size;
  std::vector<CvFold> folds;
  for (int j = 0; j < k; ++j) {
    const Eigen::Index b = first + j * size;
    folds.push_back(CvFold{b, b, b + size});
  }
  return folds;
}

inline std::vector<CvFold> cv_split(Eigen::Index n, const CvScheme& scheme) {
  return scheme.kind == CvScheme::Kind::holdout ? holdout_split(n) : forward_split(n, scheme.folds);
}

namespace detail {

// Validation residuals in weighted coordinates, centered at the training
// mean: y_t = W^{1/2} (x_t - m_train).
template <typename Scalar>
void centered_weighted(const FunctionalSample<Scalar>& sample, const VectorX<Scalar>& mean, const CvFold& fold,
                       MatrixX<Scalar>& targets, MatrixX<Scalar>& lags) {
  const Eigen::Index count = fold.target_end - fold.target_begin;
  const auto& s = sample.grid().sqrt_weights();
  targets = (sample.curves().middleRows(fold.target_begin, count).rowwise() - mean.transpose()) * s.asDiagonal();
  lags = (sample.curves().middleRows(fold.target_begin - 1, count).rowwise() - mean.transpose()) * s.asDiagonal();
}

/// Mean squared L2 validation error for every alpha, from one
/// eigendecomposition. With P = C1~ Q, z_t = Q^T y_{t-1}, D = (d + alpha)^{-1}:
///   sum_t |y_t - P D z_t|^2 = sum_t |y_t|^2 - 2 sum_k D_k b_k + sum_{kl} D_k D_l H_kl S_kl
/// where b_k = sum_t (P^T y_t)_k z_tk, H = P^T P, S = sum_t z_t z_t^T.
template <typename Scalar>
std::vector<Scalar> fold_losses_fast(const FunctionalSample<Scalar>& sample, const CvFold& fold,
                                     const std::vector<double>& alphas) {
  const auto train = sample.slice(0, fold.train_end);
  const auto moments = weighted_moments(train);
  const auto spectrum = eigendecompose(moments);
  MatrixX<Scalar> y, ylag;
  centered_weighted(sample, moments.mean_curve, fold, y, ylag);

  const MatrixX<Scalar> p = moments.c1_tilde * spectrum.eigenvectors;
  const MatrixX<Scalar> z = ylag * spectrum.eigenvectors;  // rows z_t^T
  const MatrixX<Scalar> a = y * p;                         // rows (P^T y_t)^T
  const VectorX<Scalar> b = (a.array() * z.array()).colwise().sum().transpose();
  const MatrixX<Scalar> h = p.transpose() * p;
  const MatrixX<Scalar> hs = h.cwiseProduct(z.transpose() * z);
  const Scalar yy = y.squaredNorm();
  const auto count = static_cast<Scalar>(y.rows());

  std::vector<Scalar> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    const VectorX<Scalar> d = (spectrum.eigenvalues.array() + Scalar(alpha)).inverse().matrix();
    const Scalar loss = yy - Scalar(2) * d.dot(b) + d.dot(hs * d);
    out.push_back(loss / count);
  }
  return out;
}

template <typename Scalar>
std::vector<Scalar> fold_losses_naive(const FunctionalSample<Scalar>& sample, const CvFold& fold,
                                      const std::vector<double>& alphas) {
  const auto train = sample.slice(0, fold.train_end);
  const auto moments = weighted_moments(train);
  MatrixX<Scalar> y, ylag;
  centered_weighted(sample, moments.mean_curve, fold, y, ylag);
  const Eigen::Index m = moments.c0_tilde.rows();

  std::vector<Scalar> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    const MatrixX<Scalar> shifted = moments.c0_tilde + Scalar(alpha) * MatrixX<Scalar>::Identity(m, m);
    // Psi~ (C0~ + alpha I) = C1~  <=>  (C0~ + alpha I) Psi~^T = C1~^T
    const MatrixX<Scalar> psi = shifted.ldlt().solve(moments.c1_tilde.transpose()).transpose();
    const MatrixX<Scalar> resid = y - ylag * psi.transpose();
    out.push_back(resid.squaredNorm() / static_cast<Scalar>(y.rows()));
  }
  return out;
}

}  // namespace detail

/// Index of the minimum; exact ties go to the larger alpha.
inline std::size_t argmin_prefer_larger(const std::vector<CvPoint>& curve) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].loss <= curve[best].loss) best = i;
  return best;
}

template <typename Scalar>
CvResult cv_select_alpha(const FunctionalSample<Scalar>& sample, const AlphaGrid& grid,
                         const CvScheme& scheme = CvScheme::holdout(), CvPath path = CvPath::fast) {
  if (grid.values.empty()) throw ArgumentError("cv_select_alpha: empty alpha grid");
  CvResult result;
  result.folds = cv_split(sample.length(), scheme);
  std::vector<Scalar> total(grid.values.size(), Scalar(0));
  for (const auto& fold : result.folds) {
    const auto losses = path == CvPath::fast ? detail::fold_losses_fast(sample, fold, grid.values)
                                             : detail::fold_losses_naive(sample, fold, grid.values);
    for (std::size_t i = 0; i < losses.size(); ++i) total[i] += losses[i];
  }
  const auto folds = static_cast<Scalar>(result.folds.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const double loss = static_cast<double>(total[i] / folds);
    if (!std::isfinite(loss)) throw NumericalError("cv_select_alpha: non-finite validation loss");
    result.curve.push_back(CvPoint{grid.values[i], loss});
  }
  result.selected_alpha = result.curve[argmin_prefer_larger(result.curve)].alpha;
  return result;
}

}  // namespace farx

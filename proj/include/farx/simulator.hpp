#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "farx/grid.hpp"
#include "farx/moments.hpp"

namespace farx {

/// Which index of the coefficient block carries the k^{-gamma} decay.
enum class DecayAxis { column, row, both };

/// Quantity of the drawn block that is set to `spectral_radius_target`:
/// the largest |eigenvalue|, or the largest singular value. The singular
/// value version guarantees ||Psi||_op < 1 and is the default.
enum class RescaleNorm { spectral_radius, operator_norm };

/// Data-generating regime for Monte Carlo FAR(1) paths in a Fourier basis.
struct RegimeSpec {
  std::string id = "I";
  int basis_dim = 40;
  int block_size = 3;
  double within_block_decay = 0.0;
  DecayAxis decay_axis = DecayAxis::column;
  double innovation_decay = 2.0;
  double innovation_total_variance = 0.5;
  double spectral_radius_target = 0.85;
  RescaleNorm rescale = RescaleNorm::operator_norm;
  int grid_points = 101;
  int burn_in = 100;

  /// Throws ConfigError when the spec is inconsistent.
  void validate() const;

  /// Regimes "I", "II", "III"; anything else is a ConfigError.
  static RegimeSpec named(const std::string& id);
};

const char* to_string(DecayAxis axis);
DecayAxis decay_axis_from_string(const std::string& s);
const char* to_string(RescaleNorm r);
RescaleNorm rescale_norm_from_string(const std::string& s);

struct TrueOperator {
  Eigen::MatrixXd coefficients;  // J x J, Psi = sum A_ij phi_i (x) phi_j
  double spectral_radius = 0.0;
  double operator_norm = 0.0;  // largest singular value of the coefficients
};

/// Rows are the L2-orthonormal Fourier functions on the grid:
/// 1, sqrt2 cos(2 pi u), sqrt2 sin(2 pi u), sqrt2 cos(4 pi u), ...
Eigen::MatrixXd fourier_basis(int count, const Grid& grid);

double spectral_radius(const Eigen::MatrixXd& a);

TrueOperator draw_regime_operator(const RegimeSpec& spec, std::uint64_t seed);

/// sigma_k^2 = c k^{-a}, normalized to the spec's total variance.
Eigen::VectorXd innovation_eigenvalues(const RegimeSpec& spec);

/// Score-space path xi_t = A xi_{t-1} + eta_t started at zero; the first
/// `burn_in` states are discarded. Rows are time, columns basis coordinates.
Eigen::MatrixXd simulate_scores(const Eigen::MatrixXd& a, const Eigen::VectorXd& innovation_variances, int n,
                                int burn_in, std::uint64_t seed);

/// Curves on the spec's uniform grid.
Sample simulate_far1(const TrueOperator& op, const RegimeSpec& spec, int n, std::uint64_t seed);

/// The true operator as a kernel matrix on `grid`:
/// psi(u_i, u_j) = sum_{a,b} A_ab phi_a(u_i) phi_b(u_j).
Operator true_kernel(const TrueOperator& op, const Grid& grid);

}  // namespace farx

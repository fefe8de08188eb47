#include "farx/simulator.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "farx/error.hpp"
#include "farx/random.hpp"

namespace farx {

void RegimeSpec::validate() const {
  if (basis_dim < 1) throw ConfigError("regime " + id + ": basis_dim must be >= 1");
  if (block_size < 1 || block_size > basis_dim) throw ConfigError("regime " + id + ": block_size must lie in [1, J]");
  if (within_block_decay < 0.0) throw ConfigError("regime " + id + ": within_block_decay must be >= 0");
  if (!(innovation_decay > 0.0)) throw ConfigError("regime " + id + ": innovation_decay must be > 0");
  if (!(innovation_total_variance > 0.0))
    throw ConfigError("regime " + id + ": innovation_total_variance must be > 0");
  if (!(spectral_radius_target > 0.0 && spectral_radius_target < 1.0))
    throw ConfigError("regime " + id + ": spectral_radius_target must lie in (0, 1)");
  if (grid_points < 2) throw ConfigError("regime " + id + ": grid_points must be >= 2");
  if (burn_in < 0) throw ConfigError("regime " + id + ": burn_in must be >= 0");
}

RegimeSpec RegimeSpec::named(const std::string& id) {
  RegimeSpec s;
  s.id = id;
  if (id == "I") {
    s.block_size = 3;
    s.innovation_decay = 2.0;
  } else if (id == "II") {
    s.block_size = 10;
    s.innovation_decay = 1.0;
  } else if (id == "III") {
    s.block_size = 25;
    s.within_block_decay = 0.3;
    s.innovation_decay = 0.6;
  } else {
    throw ConfigError("unknown regime '" + id + "' (expected I, II or III)");
  }
  return s;
}

const char* to_string(DecayAxis axis) {
  switch (axis) {
    case DecayAxis::column: return "column";
    case DecayAxis::row: return "row";
    case DecayAxis::both: return "both";
  }
  return "column";
}

DecayAxis decay_axis_from_string(const std::string& s) {
  if (s == "column") return DecayAxis::column;
  if (s == "row") return DecayAxis::row;
  if (s == "both") return DecayAxis::both;
  throw ConfigError("decay_axis must be column, row or both (got '" + s + "')");
}

Eigen::MatrixXd fourier_basis(int count, const Grid& grid) {
  if (count < 1) throw ArgumentError("fourier_basis: need at least one function");
  const Eigen::Index m = grid.size();
  Eigen::MatrixXd basis(count, m);
  const double root2 = std::numbers::sqrt2;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double u = grid.points()(i);
    basis(0, i) = 1.0;
    for (int r = 1; r < count; ++r) {
      const int freq = (r + 1) / 2;
      const double arg = 2.0 * std::numbers::pi * freq * u;
      basis(r, i) = (r % 2 == 1) ? root2 * std::cos(arg) : root2 * std::sin(arg);
    }
  }
  return basis;
}

const char* to_string(RescaleNorm r) {
  return r == RescaleNorm::operator_norm ? "operator_norm" : "spectral_radius";
}

RescaleNorm rescale_norm_from_string(const std::string& s) {
  if (s == "spectral_radius") return RescaleNorm::spectral_radius;
  if (s == "operator_norm") return RescaleNorm::operator_norm;
  throw ConfigError("rescale must be spectral_radius or operator_norm (got '" + s + "')");
}

double spectral_radius(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) throw NumericalError("spectral_radius: eigensolver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

TrueOperator draw_regime_operator(const RegimeSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int b = spec.block_size;
  NormalStream normal(seed);
  Eigen::MatrixXd block(b, b);
  for (int i = 0; i < b; ++i)
    for (int k = 0; k < b; ++k) block(i, k) = normal();

  if (spec.within_block_decay > 0.0) {
    for (int i = 0; i < b; ++i) {
      for (int k = 0; k < b; ++k) {
        double f = 1.0;
        if (spec.decay_axis != DecayAxis::row) f *= std::pow(double(k + 1), -spec.within_block_decay);
        if (spec.decay_axis != DecayAxis::column) f *= std::pow(double(i + 1), -spec.within_block_decay);
        block(i, k) *= f;
      }
    }
  }

  const double size = spec.rescale == RescaleNorm::spectral_radius
                          ? spectral_radius(block)
                          : Eigen::JacobiSVD<Eigen::MatrixXd>(block).singularValues()(0);
  if (!(size > 0.0)) throw NumericalError("draw_regime_operator: drawn block is zero");
  block *= spec.spectral_radius_target / size;

  TrueOperator op;
  op.coefficients = Eigen::MatrixXd::Zero(spec.basis_dim, spec.basis_dim);
  op.coefficients.topLeftCorner(b, b) = block;
  op.spectral_radius = spectral_radius(block);
  op.operator_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(block).singularValues()(0);
  return op;
}

Eigen::VectorXd innovation_eigenvalues(const RegimeSpec& spec) {
  spec.validate();
  Eigen::VectorXd s(spec.basis_dim);
  for (int k = 0; k < spec.basis_dim; ++k) s(k) = std::pow(double(k + 1), -spec.innovation_decay);
  return s * (spec.innovation_total_variance / s.sum());
}

Eigen::MatrixXd simulate_scores(const Eigen::MatrixXd& a, const Eigen::VectorXd& innovation_variances, int n,
                                int burn_in, std::uint64_t seed) {
  if (n < 2) throw InsufficientDataError("simulate: n must be >= 2");
  const Eigen::Index j = a.rows();
  if (a.cols() != j || innovation_variances.size() != j) throw DimensionError("simulate: dimension mismatch");
  const Eigen::VectorXd sd = innovation_variances.cwiseSqrt();
  NormalStream normal(seed);
  Eigen::VectorXd state = Eigen::VectorXd::Zero(j);
  Eigen::VectorXd eta(j);
  Eigen::MatrixXd out(n, j);
  for (int t = 0; t < burn_in + n; ++t) {
    for (Eigen::Index k = 0; k < j; ++k) eta(k) = sd(k) * normal();
    state = a * state + eta;
    if (t >= burn_in) out.row(t - burn_in) = state.transpose();
  }
  return out;
}

Sample simulate_far1(const TrueOperator& op, const RegimeSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (op.coefficients.rows() != spec.basis_dim) throw DimensionError("simulate_far1: operator does not match spec");
  const Grid grid = Grid::uniform(spec.grid_points);
  const Eigen::MatrixXd scores =
      simulate_scores(op.coefficients, innovation_eigenvalues(spec), n, spec.burn_in, seed);
  return Sample(grid, scores * fourier_basis(spec.basis_dim, grid));
}

Operator true_kernel(const TrueOperator& op, const Grid& grid) {
  const Eigen::MatrixXd basis = fourier_basis(static_cast<int>(op.coefficients.rows()), grid);
  return Operator{basis.transpose() * op.coefficients * basis, grid, EstimatorKind::tikhonov, {}};
}

}  // namespace farx

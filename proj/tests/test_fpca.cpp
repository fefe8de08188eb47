#include <random>

#include <doctest.h>

#include "farx/fpca.hpp"
#include "support/helpers.hpp"

using farx::Grid;
using farx::Sample;
using farx::Truncation;

namespace {

Grid unit_grid(int m) {
  Eigen::VectorXd p(m);
  for (int i = 0; i < m; ++i) p(i) = i;
  return Grid::with_weights(p, Eigen::VectorXd::Ones(m));
}

Eigen::VectorXd pm10_shares() {
  Eigen::VectorXd s(9);
  s << 0.804, 0.091, 0.043, 0.016, 0.014, 0.012, 0.011, 0.005, 0.004;
  return s;
}

// Independent least-squares route for the score VAR: QR of the lagged scores.
Eigen::MatrixXd var_by_qr(const Eigen::MatrixXd& scores) {
  const Eigen::Index n = scores.rows();
  const Eigen::MatrixXd x = scores.topRows(n - 1);
  const Eigen::MatrixXd y = scores.bottomRows(n - 1);
  return x.colPivHouseholderQr().solve(y).transpose();
}

}  // namespace

TEST_SUITE("fpca_far") {

TEST_CASE("eigendecompose: identity and diagonal") {
  const Grid g = unit_grid(3);
  const auto id = farx::eigendecompose(Eigen::MatrixXd::Identity(3, 3).eval(), g);
  CHECK((id.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-14);
  const Eigen::MatrixXd q = id.eigenvectors;
  CHECK((q * id.eigenvalues.asDiagonal() * q.transpose() - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-13);

  const Eigen::MatrixXd d = Eigen::Vector3d(2.0, 3.0, 1.0).asDiagonal();
  const auto dd = farx::eigendecompose(d, g);
  CHECK((dd.eigenvalues - Eigen::Vector3d(3, 2, 1)).norm() < 1e-14);
  // signed permutation: every column has one entry of magnitude one
  for (int k = 0; k < 3; ++k) CHECK(dd.eigenvectors.col(k).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK(std::abs(dd.eigenvectors(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("eigendecompose: random PSD reconstruction and ordering") {
  const Grid g = unit_grid(6);
  const Eigen::MatrixXd c = testing::random_psd(6, 17);
  const auto s = farx::eigendecompose(c, g);
  const Eigen::MatrixXd r = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
  CHECK((r - c).norm() <= 1e-8 * c.norm());
  for (int k = 1; k < 6; ++k) CHECK(s.eigenvalues(k) <= s.eigenvalues(k - 1));
  CHECK((s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-12);
}

TEST_CASE("eigendecompose: negative spectrum is rejected, round-off clamped") {
  const Grid g = unit_grid(2);
  CHECK_THROWS_AS(farx::eigendecompose(Eigen::MatrixXd(Eigen::Vector2d(1.0, -0.5).asDiagonal().toDenseMatrix()), g),
                  farx::NumericalError);
  const auto s = farx::eigendecompose(Eigen::MatrixXd(Eigen::Vector2d(1.0, -1e-14).asDiagonal().toDenseMatrix()), g);
  CHECK(s.eigenvalues(1) == 0.0);
}

TEST_CASE("eigenfunctions are L2-orthonormal under quadrature") {
  const Grid g = Grid::uniform(21);
  const Sample smp(g, testing::random_matrix(60, 21, 3));
  const auto s = farx::eigendecompose(farx::weighted_moments(smp));
  const Eigen::MatrixXd phi = s.eigenfunctions(5);
  const Eigen::MatrixXd gram = phi.transpose() * g.weights().asDiagonal() * phi;
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-12);
}

TEST_CASE("select_k case list") {
  const Eigen::VectorXd s = pm10_shares();
  CHECK(s.sum() == doctest::Approx(1.0));
  CHECK(farx::select_k(s, 0.80) == 1);
  CHECK(farx::select_k(s, 0.85) == 2);
  CHECK(farx::select_k(s, 0.90) == 3);
  CHECK(farx::select_k(s, 0.95) == 4);
  CHECK(farx::select_k(s, 0.99) == 7);
  // scale invariance
  CHECK(farx::select_k(Eigen::VectorXd(37.0 * s), 0.95) == 4);
}

TEST_CASE("select_k edge cases") {
  CHECK(farx::select_k(Eigen::VectorXd::Ones(1).eval(), 0.3) == 1);
  CHECK(farx::select_k(Eigen::VectorXd::Ones(1).eval(), 1.0) == 1);
  CHECK(farx::select_k(Eigen::VectorXd::Constant(4, 0.25).eval(), 0.6) == 3);
  CHECK(farx::select_k(Eigen::VectorXd::Constant(4, 0.25).eval(), 1.0) == 4);
  CHECK_THROWS_AS(farx::select_k(Eigen::VectorXd::Zero(3).eval(), 0.9), farx::DegenerateSpectrumError);
  CHECK_THROWS_AS(farx::select_k(Eigen::VectorXd::Ones(3).eval(), 0.0), farx::ArgumentError);
  CHECK_THROWS_AS(farx::select_k(Eigen::VectorXd::Ones(3).eval(), 1.5), farx::ArgumentError);
}

TEST_CASE("select_k is monotone in tau") {
  const Eigen::VectorXd s = pm10_shares();
  int prev = 0;
  for (double tau = 0.05; tau <= 1.0; tau += 0.01) {
    const int k = farx::select_k(s, tau);
    CHECK(k >= prev);
    prev = k;
  }
}

TEST_CASE("scalar AR(1) recovery") {
  const Sample smp = testing::scalar_ar1_sample(400, 0.5, 31, 12);
  const auto fit = farx::fpca_far_fit_detailed(smp, Truncation::components(1));
  CHECK(fit.coefficient.rows() == 1);
  CHECK(std::abs(fit.coefficient(0, 0) - 0.5) < 0.1);
}

TEST_CASE("no dynamics gives a near-zero coefficient") {
  const Sample smp = testing::scalar_ar1_sample(400, 0.0, 31, 5);
  const auto fit = farx::fpca_far_fit_detailed(smp, Truncation::components(1));
  CHECK(std::abs(fit.coefficient(0, 0)) < 0.15);
}

TEST_CASE("score VAR matches an independent QR solve") {
  const Sample smp(Grid::uniform(15), testing::random_matrix(80, 15, 8));
  const auto fit = farx::fpca_far_fit_detailed(smp, Truncation::components(4));
  CHECK(testing::rel_frobenius(fit.coefficient, var_by_qr(fit.scores)) < 1e-10);
}

TEST_CASE("prediction equivalence with score-space reconstruction") {
  const Grid g = Grid::uniform(17);
  const Sample smp(g, testing::random_matrix(90, 17, 21));
  const auto fit = farx::fpca_far_fit_detailed(smp, Truncation::threshold(0.8));
  const Eigen::VectorXd x = testing::random_matrix(17, 1, 99);
  // scores of x by explicit quadrature sums
  Eigen::VectorXd s(fit.k);
  for (int k = 0; k < fit.k; ++k) {
    double acc = 0.0;
    for (int i = 0; i < 17; ++i) acc += g.weights()(i) * fit.eigenfunctions(i, k) * x(i);
    s(k) = acc;
  }
  const Eigen::VectorXd next_scores = fit.coefficient * s;
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(17);
  for (int k = 0; k < fit.k; ++k) expected += next_scores(k) * fit.eigenfunctions.col(k);
  const Eigen::VectorXd got = farx::apply_kernel(fit.estimate, x);
  CHECK((got - expected).norm() <= 1e-8 * expected.norm());
}

TEST_CASE("kernel rank is at most K") {
  const Sample smp(Grid::uniform(19), testing::random_matrix(70, 19, 2));
  for (int k : {1, 3, 6}) {
    const auto op = farx::fpca_far_fit(smp, Truncation::components(k));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op.kernel);
    const auto& sv = svd.singularValues();
    for (int i = k; i < sv.size(); ++i) CHECK(sv(i) < 1e-10 * sv(0));
  }
}

TEST_CASE("kernel is invariant to eigenfunction sign flips") {
  const Sample smp(Grid::uniform(13), testing::random_matrix(50, 13, 6));
  const auto fit = farx::fpca_far_fit_detailed(smp, Truncation::components(3));
  Eigen::Vector3d flip(-1.0, 1.0, -1.0);
  const Eigen::MatrixXd phi = fit.eigenfunctions * flip.asDiagonal();
  const Eigen::MatrixXd scores = fit.scores * flip.asDiagonal();
  const Eigen::MatrixXd b = var_by_qr(scores);
  CHECK(testing::rel_frobenius(phi * b * phi.transpose(), fit.estimate.kernel) < 1e-10);
}

TEST_CASE("tuning record") {
  const Sample smp(Grid::uniform(13), testing::random_matrix(50, 13, 6));
  const auto op = farx::fpca_far_fit(smp, Truncation::threshold(0.9));
  REQUIRE(op.tuning.tau);
  REQUIRE(op.tuning.k);
  CHECK(*op.tuning.tau == 0.9);
  CHECK(op.method == farx::EstimatorKind::fpca);
}

TEST_CASE("errors") {
  const Sample smp(Grid::uniform(5), testing::random_matrix(30, 5, 1));
  CHECK_THROWS_AS(farx::fpca_far_fit(smp, Truncation::components(6)), farx::ArgumentError);
  CHECK_THROWS_AS(farx::fpca_far_fit(smp, Truncation::components(0)), farx::ArgumentError);
  CHECK_THROWS_AS(farx::fpca_far_fit(smp, Truncation{}), farx::ArgumentError);
  const Sample tiny(Grid::uniform(5), testing::random_matrix(4, 5, 1));
  CHECK_THROWS_AS(farx::fpca_far_fit(tiny, Truncation::components(3)), farx::InsufficientDataError);
  // rank-one curves: the second score is round-off only
  const Sample flat = testing::scalar_ar1_sample(60, 0.4, 11, 3);
  CHECK_THROWS_AS(farx::fpca_far_fit(flat, Truncation::components(2)), farx::SingularSystemError);
}

}

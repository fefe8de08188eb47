#include "farx/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "farx/error.hpp"
#include "farx/fpca.hpp"
#include "farx/random.hpp"
#include "farx/simulator.hpp"
#include "farx/tikhonov.hpp"

namespace farx::verify {

namespace {

using clock = std::chrono::steady_clock;

int uniform_int(NormalStream& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform() * double(hi - lo + 1));
}

double elapsed(clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); }

// Dense route: solve (C0~ + alpha I) X = C1~^T with partial-pivot LU.
Eigen::MatrixXd dense_tikhonov(const Eigen::MatrixXd& c0, const Eigen::MatrixXd& c1, double alpha) {
  const Eigen::MatrixXd shifted = c0 + alpha * Eigen::MatrixXd::Identity(c0.rows(), c0.cols());
  return Eigen::PartialPivLU<Eigen::MatrixXd>(shifted.transpose()).solve(c1.transpose()).transpose();
}

}  // namespace

Sample random_instance(int n, int m, std::uint64_t seed) {
  NormalStream rng(seed);
  Eigen::MatrixXd b(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = rng();
  b *= 0.5 / spectral_radius(b);
  Eigen::MatrixXd x(n, m);
  Eigen::VectorXd state = Eigen::VectorXd::Zero(m);
  for (int t = -50; t < n; ++t) {
    Eigen::VectorXd e(m);
    for (int i = 0; i < m; ++i) e(i) = rng();
    state = b * state + e;
    if (t >= 0) x.row(t) = state.transpose();
  }
  return Sample(Grid::uniform(m), std::move(x));
}

CheckResult tikhonov_dense_equivalence(int instances, std::uint64_t seed, double tol) {
  const auto t0 = clock::now();
  CheckResult r{"tikhonov spectral route == dense solve", true, 0.0, tol, 0, 0.0, ""};
  NormalStream rng(seed);
  const AlphaGrid alphas = default_alpha_grid();
  for (int i = 0; i < instances; ++i) {
    const int n = uniform_int(rng, 40, 120);
    const int m = uniform_int(rng, 11, 41);
    const Sample s = random_instance(n, m, derive_seed({seed, std::uint64_t(i)}));
    const auto moments = weighted_moments(s);
    const auto spectrum = eigendecompose(moments);
    for (double alpha : alphas.values) {
      const Eigen::MatrixXd spectral = tikhonov_weighted(moments.c1_tilde, spectrum, alpha);
      const Eigen::MatrixXd dense = dense_tikhonov(moments.c0_tilde, moments.c1_tilde, alpha);
      const double err = (spectral - dense).norm() / dense.norm();
      r.worst = std::max(r.worst, err);
      ++r.cases;
    }
  }
  r.passed = r.worst <= tol;
  r.seconds = elapsed(t0);
  return r;
}

CheckResult fast_cv_equivalence(int instances, std::uint64_t seed, double tol) {
  const auto t0 = clock::now();
  CheckResult r{"fast CV == naive per-alpha refit", true, 0.0, tol, 0, 0.0, ""};
  NormalStream rng(seed);
  const AlphaGrid alphas = default_alpha_grid();
  for (int i = 0; i < instances; ++i) {
    const int n = i == 0 ? 60 : uniform_int(rng, 40, 120);
    const int m = i == 0 ? 21 : uniform_int(rng, 11, 41);
    const Sample s = random_instance(n, m, derive_seed({seed, std::uint64_t(i), 7}));
    const CvResult fast = cv_select_alpha(s, alphas, CvScheme::holdout(), CvPath::fast);

    // Oracle: refit per alpha, apply the unweighted kernel by quadrature to
    // centered lags, accumulate quadrature norms.
    const CvFold fold = fast.folds.at(0);
    const Sample train = s.slice(0, fold.train_end);
    const auto moments = weighted_moments(train);
    const Grid& grid = s.grid();
    for (std::size_t a = 0; a < alphas.values.size(); ++a) {
      const Eigen::MatrixXd psi_w = dense_tikhonov(moments.c0_tilde, moments.c1_tilde, alphas.values[a]);
      const Operator op{unweight_matrix(psi_w, grid), grid, EstimatorKind::tikhonov, {}};
      double total = 0.0;
      for (Eigen::Index t = fold.target_begin; t < fold.target_end; ++t) {
        const Eigen::VectorXd lag = s.curve(t - 1) - moments.mean_curve;
        const Eigen::VectorXd target = s.curve(t) - moments.mean_curve;
        const Eigen::VectorXd resid = target - apply_kernel(op, lag);
        total += squared_l2_norm(resid, grid);
      }
      const double naive = total / double(fold.target_end - fold.target_begin);
      const double err = std::abs(fast.curve[a].loss - naive) / std::abs(naive);
      r.worst = std::max(r.worst, err);
      ++r.cases;
    }
  }
  r.passed = r.worst <= tol;
  r.seconds = elapsed(t0);
  return r;
}

namespace {

CheckResult limit_check(const std::string& name, int instances, std::uint64_t seed, double tol, bool matched) {
  const auto t0 = clock::now();
  CheckResult r{name, true, 0.0, tol, 0, 0.0, ""};
  NormalStream rng(seed);
  for (int i = 0; i < instances; ++i) {
    const int m = uniform_int(rng, 11, 21);
    const int n = uniform_int(rng, 3 * m, 120);
    const Sample s = random_instance(n, m, derive_seed({seed, std::uint64_t(i), 3}));
    const Operator fpca = fpca_far_fit(s, Truncation::components(m));

    auto moments = weighted_moments(s);
    if (matched) {
      // Lag pairs t = 1..n-1 for both moments, common divisor.
      const Eigen::MatrixXd y = (s.curves().rowwise() - moments.mean_curve.transpose()) *
                                s.grid().sqrt_weights().asDiagonal();
      const auto lead = y.topRows(n - 1);
      moments.c0_tilde = lead.transpose() * lead / double(n - 1);
      moments.c0_tilde = (moments.c0_tilde + moments.c0_tilde.transpose()) / 2.0;
      moments.c1_tilde = y.bottomRows(n - 1).transpose() * lead / double(n - 1);
    }
    const auto spectrum = eigendecompose(moments);
    const Operator tik = tikhonov_fit(moments, spectrum, 1e-12 * spectrum.eigenvalues(0));
    const Eigen::VectorXd last = s.curve(n - 1);
    const Eigen::VectorXd a = apply_kernel(fpca, last);
    const Eigen::VectorXd b = apply_kernel(tik, last);
    r.worst = std::max(r.worst, (a - b).norm() / a.norm());
    ++r.cases;
  }
  r.passed = r.worst <= tol;
  r.seconds = elapsed(t0);
  return r;
}

}  // namespace

CheckResult fpca_tikhonov_limit(int instances, std::uint64_t seed, double tol) {
  return limit_check("FPCA(K=M) == Tikhonov(alpha->0)", instances, seed, tol, false);
}

CheckResult fpca_tikhonov_limit_matched(int instances, std::uint64_t seed, double tol) {
  return limit_check("FPCA(K=M) == Tikhonov(alpha->0), matched lag-pair moments", instances, seed, tol, true);
}

CheckResult bias_bound_suite(const std::vector<TheoryProbe>& probes, double rho_scale) {
  if (probes.empty()) throw ArgumentError("bias_bound_suite: empty probe list");
  const auto t0 = clock::now();
  CheckResult r{"bias bound |Psi_alpha - Psi| <= rho alpha^min(beta,1)", true, 0.0, 1.0, 0, 0.0, ""};
  const AlphaGrid alphas = default_alpha_grid();
  std::ostringstream failures;
  int violations = 0;
  for (TheoryProbe p : probes) {
    p.rho *= rho_scale;
    for (const BiasCheck& c : verify_bias_bound(p, alphas.values)) {
      ++r.cases;
      r.worst = std::max(r.worst, c.bias / c.bound);
      if (!c.holds) {
        if (violations < 5) failures << p.name << " at alpha=" << c.alpha << "; ";
        ++violations;
      }
    }
  }
  r.passed = violations == 0;
  if (violations > 0) r.detail = std::to_string(violations) + " violations: " + failures.str();
  r.seconds = elapsed(t0);
  return r;
}

}  // namespace farx::verify

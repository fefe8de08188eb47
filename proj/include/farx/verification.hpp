#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "farx/evaluation.hpp"
#include "farx/moments.hpp"

namespace farx::verify {

// Independent-oracle checks shared by the `verify` command and the
// acceptance suite. Each oracle takes a different computational route from
// the library code it checks (dense LU solves, direct quadrature sums).

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst observed error (or bias/bound ratio)
  double tolerance = 0.0;
  int cases = 0;
  double seconds = 0.0;
  std::string detail;
};

/// Grid-level VAR(1) sample x_t = B x_{t-1} + e_t on a uniform M-point grid
/// with i.i.d. N(0,1) grid noise and spectral radius 0.5; full rank when n > M.
Sample random_instance(int n, int m, std::uint64_t seed);

/// Spectral-route Tikhonov vs a dense LU solve of Psi~ (C0~ + alpha I) = C1~,
/// every default-grid alpha, relative Frobenius error.
CheckResult tikhonov_dense_equivalence(int instances = 25, std::uint64_t seed = 1, double tol = 1e-10);

/// Fast holdout CV curve vs per-alpha refits evaluated by explicit kernel
/// application and quadrature norms.
CheckResult fast_cv_equivalence(int instances = 10, std::uint64_t seed = 2, double tol = 1e-9);

/// K = M FPCA prediction vs Tikhonov at alpha = 1e-12 lambda1, on full-rank
/// instances with n - 1 >= M.
CheckResult fpca_tikhonov_limit(int instances = 10, std::uint64_t seed = 3, double tol = 1e-6);

/// Same comparison with the Tikhonov moments built over the same lag pairs
/// and divisor as the score regression (t = 1..n-1).
CheckResult fpca_tikhonov_limit_matched(int instances = 10, std::uint64_t seed = 3, double tol = 1e-6);

/// Bias bound on every probe at every default-grid alpha; `rho_scale`
/// multiplies each probe's rho (0.5 is the negative control).
CheckResult bias_bound_suite(const std::vector<TheoryProbe>& probes, double rho_scale = 1.0);

}  // namespace farx::verify

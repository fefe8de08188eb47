#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "farx/methods.hpp"
#include "farx/moments.hpp"
#include "farx/simulator.hpp"

namespace farx {

// ---------------------------------------------------------------------------
// Forecast metrics

/// Mean integrated squared one-step forecast error over a test path:
/// (1/(T-1)) sum_t |X_{t+1} - Psi X_t|^2 with the grid's quadrature norm.
double misfe(const Operator& op, const Sample& test);

/// Flat grid average (1/M) sum_j (x_j - xhat_j)^2.
double ise(const Eigen::VectorXd& forecast, const Eigen::VectorXd& actual);

/// Quadrature version of the same integral.
double ise_quadrature(const Eigen::VectorXd& forecast, const Eigen::VectorXd& actual, const Grid& grid);

/// Hilbert-Schmidt distance between two kernels on the same grid.
double hilbert_schmidt_distance(const Operator& a, const Operator& b);

// ---------------------------------------------------------------------------
// Monte Carlo benchmark

struct BenchmarkConfig {
  std::vector<RegimeSpec> regimes;
  std::vector<int> sample_sizes;
  std::vector<MethodSpec> methods;
  int replications = 50;
  int test_length = 200;
  std::uint64_t master_seed = 20240601;
  int threads = 1;

  /// 3 regimes x n in {100, 200, 400, 800} x (FPCA-80..99, Tikhonov-CV) x R = 50.
  static BenchmarkConfig standard();
  void validate() const;
};

struct CellResult {
  std::string regime;
  int n = 0;
  std::string method;
  int replication = 0;
  bool ok = true;
  double misfe = 0.0;
  double tuning = 0.0;  // K or alpha
  double estimation_error = 0.0;  // HS distance to the true kernel (diagnostic)
  double seconds = 0.0;
  std::string error;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<CellResult> records;  // sorted by (regime, n, method, replication) in config order
  double wall_seconds = 0.0;
};

/// Seed of the regime's single operator draw.
std::uint64_t operator_seed(std::uint64_t master, const std::string& regime_id);
/// Seed of one sample path; `tag` 0 = training path, 1 = test path.
std::uint64_t path_seed(std::uint64_t master, const std::string& regime_id, int n, int replication, int tag);

BenchmarkReport run_benchmark(const BenchmarkConfig& config);

// ---------------------------------------------------------------------------
// Derived tables

struct CellSummary {
  std::string regime;
  int n = 0;
  std::string method;
  int count = 0;     // successful replications
  int failures = 0;  // excluded from the mean
  double mean_misfe = 0.0;
  double stderr_misfe = 0.0;     // sample sd / sqrt(count)
  double mean_tuning = 0.0;      // mean K, or mean log10 alpha for Tikhonov
  double mean_estimation_error = 0.0;
};

struct RegretEntry {
  std::string regime;
  int n = 0;
  std::string method;
  double regret_percent = 0.0;
};

struct WorstCaseEntry {
  std::string method;
  int n = 0;
  double worst_mean_misfe = 0.0;
  std::string worst_regime;
};

std::vector<CellSummary> summarize(const BenchmarkReport& report);

/// 100 * (mean(m) - min over FPCA-tau of mean) / min, per (regime, n).
/// Every cell must contain every FPCA-tau method in the report.
std::vector<RegretEntry> regret_table(const BenchmarkReport& report);
std::vector<RegretEntry> regret_table(const std::vector<CellSummary>& cells,
                                      const std::vector<MethodSpec>& methods);

/// Max over regimes of the mean MISFE, per (method, n).
std::vector<WorstCaseEntry> worst_case_table(const std::vector<CellSummary>& cells);

/// Mean K (FPCA) or mean log10 alpha (Tikhonov) per cell; the mean_tuning
/// column of summarize().
std::vector<CellSummary> tuning_summary(const BenchmarkReport& report);

/// Least-squares slope of y on log10(n) pooled over all points.
double rate_slope(const std::vector<std::pair<int, double>>& n_and_log10_alpha);
/// Pools the Tikhonov-CV tuning summaries of a report.
double rate_slope(const std::vector<CellSummary>& cells, const std::string& method_label = "Tikhonov-CV");

/// Per-method slope of log10 mean HS estimation error on log10 n (soft
/// diagnostic, never asserted).
std::vector<std::pair<std::string, double>> estimation_error_slopes(const std::vector<CellSummary>& cells);

// ---------------------------------------------------------------------------
// Regularization-bias probe

/// Finite-dimensional source-condition instance: diagonal C0 with
/// eigenvalues lambda_k, Psi = F C0^beta, rho = |F|_HS unless overridden.
struct TheoryProbe {
  std::string name;
  double beta = 1.0;
  double rho = 0.0;
  Eigen::MatrixXd f;
  Eigen::VectorXd lambdas;

  static TheoryProbe make(std::string name, double beta, Eigen::MatrixXd f, Eigen::VectorXd lambdas);
  Eigen::MatrixXd psi() const;
};

struct BiasCheck {
  double alpha = 0.0;
  double bias = 0.0;
  double bound = 0.0;
  bool holds = true;
};

/// |Psi_alpha - Psi|_HS with Psi_alpha = Psi C0 (C0 + alpha)^{-1} in closed
/// form, against rho alpha^{min(beta, 1)}.
std::vector<BiasCheck> verify_bias_bound(const TheoryProbe& probe, const std::vector<double>& alphas);

/// Probes with lambda_k = k^{-2} for beta in {0.25, 0.5, 1, 2}, each with a
/// diagonal and a dense seeded F.
std::vector<TheoryProbe> default_probes(int dim = 40, std::uint64_t seed = 11);

}  // namespace farx

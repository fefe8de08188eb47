#include "farx/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include "farx/error.hpp"
#include "farx/random.hpp"
#include "farx/tikhonov.hpp"

namespace farx {

double misfe(const Operator& op, const Sample& test) {
  if (test.length() < 2) throw InsufficientDataError("misfe: test path needs at least 2 curves");
  require_same_grid(op.grid, test.grid(), "misfe");
  const Eigen::Index t = test.length();
  const Eigen::MatrixXd predicted = apply_kernel_rows(op, Eigen::MatrixXd(test.curves().topRows(t - 1)));
  const Eigen::MatrixXd resid = test.curves().bottomRows(t - 1) - predicted;
  const double total = (resid.array().square().matrix() * test.grid().weights()).sum();
  return total / double(t - 1);
}

double ise(const Eigen::VectorXd& forecast, const Eigen::VectorXd& actual) {
  if (forecast.size() != actual.size() || forecast.size() == 0)
    throw DimensionError("ise: forecast and actual differ in length");
  return (actual - forecast).squaredNorm() / double(actual.size());
}

double ise_quadrature(const Eigen::VectorXd& forecast, const Eigen::VectorXd& actual, const Grid& grid) {
  if (forecast.size() != actual.size()) throw DimensionError("ise_quadrature: length mismatch");
  return squared_l2_norm(Eigen::VectorXd(actual - forecast), grid);
}

double hilbert_schmidt_distance(const Operator& a, const Operator& b) {
  require_same_grid(a.grid, b.grid, "hilbert_schmidt_distance");
  const Eigen::MatrixXd d = a.kernel - b.kernel;
  const auto& w = a.grid.weights();
  return std::sqrt((w.asDiagonal() * d.array().square().matrix() * w.asDiagonal()).sum());
}

// ---------------------------------------------------------------------------

BenchmarkConfig BenchmarkConfig::standard() {
  BenchmarkConfig c;
  c.regimes = {RegimeSpec::named("I"), RegimeSpec::named("II"), RegimeSpec::named("III")};
  c.sample_sizes = {100, 200, 400, 800};
  for (double tau : kStandardThresholds) c.methods.push_back(MethodSpec::fpca_threshold(tau));
  c.methods.push_back(MethodSpec::tikhonov_holdout_cv());
  return c;
}

void BenchmarkConfig::validate() const {
  if (regimes.empty()) throw ConfigError("benchmark: no regimes");
  if (sample_sizes.empty()) throw ConfigError("benchmark: no sample sizes");
  if (methods.empty()) throw ConfigError("benchmark: no methods");
  if (replications < 1) throw ConfigError("benchmark: replications must be >= 1");
  if (test_length < 2) throw ConfigError("benchmark: test_length must be >= 2");
  if (threads < 1) throw ConfigError("benchmark: threads must be >= 1");
  std::set<std::string> ids;
  for (const auto& r : regimes) {
    r.validate();
    if (!ids.insert(r.id).second) throw ConfigError("benchmark: duplicate regime id " + r.id);
  }
  for (int n : sample_sizes)
    if (n < 2) throw ConfigError("benchmark: sample sizes must be >= 2");
  std::set<std::string> labels;
  for (const auto& m : methods)
    if (!labels.insert(m.label()).second) throw ConfigError("benchmark: duplicate method " + m.label());
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t kOperatorTag = 0x6F70;  // "op"

}  // namespace

std::uint64_t operator_seed(std::uint64_t master, const std::string& regime_id) {
  return derive_seed({master, fnv1a(regime_id), kOperatorTag});
}

std::uint64_t path_seed(std::uint64_t master, const std::string& regime_id, int n, int replication, int tag) {
  return derive_seed({master, fnv1a(regime_id), static_cast<std::uint64_t>(n),
                      static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(tag)});
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  struct RegimeState {
    TrueOperator op;
    Operator kernel;
  };
  std::vector<RegimeState> states;
  for (const auto& r : config.regimes) {
    TrueOperator op = draw_regime_operator(r, operator_seed(config.master_seed, r.id));
    Operator kernel = true_kernel(op, Grid::uniform(r.grid_points));
    states.push_back(RegimeState{std::move(op), std::move(kernel)});
  }

  const std::size_t n_regimes = config.regimes.size();
  const std::size_t n_sizes = config.sample_sizes.size();
  const std::size_t n_methods = config.methods.size();
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t jobs = n_regimes * n_sizes * reps;

  // Slot (regime, size, method, rep) is written by exactly one job.
  std::vector<CellResult> records(jobs * n_methods);
  auto slot = [&](std::size_t r, std::size_t s, std::size_t m, std::size_t rep) {
    return ((r * n_sizes + s) * n_methods + m) * reps + rep;
  };

  auto run_job = [&](std::size_t job) {
    const std::size_t rep = job % reps;
    const std::size_t s = (job / reps) % n_sizes;
    const std::size_t r = job / (reps * n_sizes);
    const RegimeSpec& spec = config.regimes[r];
    const int n = config.sample_sizes[s];
    const int irep = static_cast<int>(rep);
    const Sample train =
        simulate_far1(states[r].op, spec, n, path_seed(config.master_seed, spec.id, n, irep, 0));
    const Sample test = simulate_far1(states[r].op, spec, config.test_length,
                                      path_seed(config.master_seed, spec.id, n, irep, 1));
    for (std::size_t m = 0; m < n_methods; ++m) {
      CellResult& out = records[slot(r, s, m, rep)];
      out.regime = spec.id;
      out.n = n;
      out.method = config.methods[m].label();
      out.replication = irep;
      const auto t0 = clock::now();
      try {
        const FitOutcome fit = fit_method(config.methods[m], train);
        out.misfe = misfe(fit.estimate, test);
        out.tuning = fit.tuning;
        out.estimation_error = hilbert_schmidt_distance(fit.estimate, states[r].kernel);
        out.ok = true;
      } catch (const Error& e) {
        out.ok = false;
        out.error = e.kind() + ": " + e.what();
      }
      out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    }
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(config.threads, jobs));
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs; j = next++) run_job(j);
      });
    for (auto& th : pool) th.join();
  }

  BenchmarkReport report;
  report.config = config;
  report.records = std::move(records);
  report.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------

namespace {

bool is_tikhonov_label(const std::string& label) { return label.rfind("Tikhonov", 0) == 0; }

}  // namespace

std::vector<CellSummary> summarize(const BenchmarkReport& report) {
  std::vector<CellSummary> out;
  std::map<std::tuple<std::string, int, std::string>, std::size_t> index;
  for (const auto& rec : report.records) {
    const auto key = std::make_tuple(rec.regime, rec.n, rec.method);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      CellSummary c;
      c.regime = rec.regime;
      c.n = rec.n;
      c.method = rec.method;
      out.push_back(c);
    }
    CellSummary& c = out[it->second];
    if (!rec.ok) {
      ++c.failures;
      continue;
    }
    ++c.count;
    c.mean_misfe += rec.misfe;
    c.mean_tuning += is_tikhonov_label(rec.method) ? std::log10(rec.tuning) : rec.tuning;
    c.mean_estimation_error += rec.estimation_error;
  }
  for (auto& c : out) {
    if (c.count == 0) {
      c.mean_misfe = c.mean_tuning = c.mean_estimation_error = std::nan("");
      continue;
    }
    c.mean_misfe /= c.count;
    c.mean_tuning /= c.count;
    c.mean_estimation_error /= c.count;
  }
  // Second pass for the standard error, in record order.
  std::vector<double> ss(out.size(), 0.0);
  for (const auto& rec : report.records) {
    if (!rec.ok) continue;
    const std::size_t i = index.at(std::make_tuple(rec.regime, rec.n, rec.method));
    const double d = rec.misfe - out[i].mean_misfe;
    ss[i] += d * d;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int k = out[i].count;
    out[i].stderr_misfe = k > 1 ? std::sqrt(ss[i] / (k - 1)) / std::sqrt(double(k)) : 0.0;
  }
  return out;
}

std::vector<RegretEntry> regret_table(const std::vector<CellSummary>& cells, const std::vector<MethodSpec>& methods) {
  std::vector<std::string> fpca;
  for (const auto& m : methods)
    if (m.kind == MethodSpec::Kind::fpca_tau) fpca.push_back(m.label());
  if (fpca.empty()) throw DataError("regret_table: no FPCA threshold methods to use as the oracle");

  // Cells in first-seen order.
  std::vector<std::pair<std::string, int>> order;
  std::map<std::pair<std::string, int>, std::vector<const CellSummary*>> by_cell;
  for (const auto& c : cells) {
    const auto key = std::make_pair(c.regime, c.n);
    if (!by_cell.count(key)) order.push_back(key);
    by_cell[key].push_back(&c);
  }

  std::vector<RegretEntry> out;
  for (const auto& key : order) {
    const auto& members = by_cell[key];
    double best = INFINITY;
    for (const auto& label : fpca) {
      const auto it = std::find_if(members.begin(), members.end(), [&](const CellSummary* c) { return c->method == label; });
      if (it == members.end() || (*it)->count == 0)
        throw DataError("regret_table: cell (" + key.first + ", " + std::to_string(key.second) + ") lacks " + label);
      best = std::min(best, (*it)->mean_misfe);
    }
    if (!(best > 0.0)) throw DataError("regret_table: best FPCA mean MISFE is not positive");
    for (const CellSummary* c : members) {
      // The best FPCA rule gets exactly zero.
      const double regret = c->mean_misfe == best ? 0.0 : 100.0 * (c->mean_misfe - best) / best;
      out.push_back(RegretEntry{c->regime, c->n, c->method, regret});
    }
  }
  return out;
}

std::vector<RegretEntry> regret_table(const BenchmarkReport& report) {
  return regret_table(summarize(report), report.config.methods);
}

std::vector<WorstCaseEntry> worst_case_table(const std::vector<CellSummary>& cells) {
  std::vector<std::string> regimes;
  for (const auto& c : cells)
    if (std::find(regimes.begin(), regimes.end(), c.regime) == regimes.end()) regimes.push_back(c.regime);

  std::vector<std::pair<std::string, int>> order;
  std::map<std::pair<std::string, int>, std::vector<const CellSummary*>> groups;
  for (const auto& c : cells) {
    const auto key = std::make_pair(c.method, c.n);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&c);
  }
  std::vector<WorstCaseEntry> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    if (g.size() != regimes.size())
      throw DataError("worst_case_table: method " + key.first + " at n = " + std::to_string(key.second) +
                      " is missing a regime");
    WorstCaseEntry e{key.first, key.second, -INFINITY, ""};
    for (const CellSummary* c : g) {
      if (c->count == 0)
        throw DataError("worst_case_table: no successful replications for " + c->method + " in regime " + c->regime);
      if (c->mean_misfe > e.worst_mean_misfe) {
        e.worst_mean_misfe = c->mean_misfe;
        e.worst_regime = c->regime;
      }
    }
    out.push_back(e);
  }
  return out;
}

std::vector<CellSummary> tuning_summary(const BenchmarkReport& report) { return summarize(report); }

double rate_slope(const std::vector<std::pair<int, double>>& points) {
  std::set<int> distinct;
  for (const auto& p : points) distinct.insert(p.first);
  if (distinct.size() < 2) throw DataError("rate_slope: need at least two distinct sample sizes");
  double mx = 0.0, my = 0.0;
  for (const auto& [n, y] : points) {
    mx += std::log10(double(n));
    my += y;
  }
  mx /= double(points.size());
  my /= double(points.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [n, y] : points) {
    const double dx = std::log10(double(n)) - mx;
    sxy += dx * (y - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double rate_slope(const std::vector<CellSummary>& cells, const std::string& method_label) {
  std::vector<std::pair<int, double>> points;
  for (const auto& c : cells)
    if (c.method == method_label && c.count > 0) points.emplace_back(c.n, c.mean_tuning);
  return rate_slope(points);
}

std::vector<std::pair<std::string, double>> estimation_error_slopes(const std::vector<CellSummary>& cells) {
  std::vector<std::string> methods;
  for (const auto& c : cells)
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
  std::vector<std::pair<std::string, double>> out;
  for (const auto& m : methods) {
    std::vector<std::pair<int, double>> pts;
    for (const auto& c : cells)
      if (c.method == m && c.count > 0 && c.mean_estimation_error > 0.0)
        pts.emplace_back(c.n, std::log10(c.mean_estimation_error));
    try {
      out.emplace_back(m, rate_slope(pts));
    } catch (const DataError&) {
      out.emplace_back(m, std::nan(""));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

TheoryProbe TheoryProbe::make(std::string name, double beta, Eigen::MatrixXd f, Eigen::VectorXd lambdas) {
  if (!(beta > 0.0)) throw ArgumentError("probe: beta must be positive");
  if (f.rows() != f.cols() || f.rows() != lambdas.size()) throw DimensionError("probe: F and lambdas disagree");
  if ((lambdas.array() <= 0.0).any()) throw ArgumentError("probe: eigenvalues must be positive");
  TheoryProbe p;
  p.name = std::move(name);
  p.beta = beta;
  p.rho = f.norm();
  p.f = std::move(f);
  p.lambdas = std::move(lambdas);
  return p;
}

Eigen::MatrixXd TheoryProbe::psi() const {
  return f * lambdas.array().pow(beta).matrix().asDiagonal();
}

std::vector<BiasCheck> verify_bias_bound(const TheoryProbe& probe, const std::vector<double>& alphas) {
  const Eigen::MatrixXd psi = probe.psi();
  const double exponent = std::min(probe.beta, 1.0);
  std::vector<BiasCheck> out;
  for (double alpha : alphas) {
    // Psi_alpha - Psi = -alpha Psi (C0 + alpha)^{-1}, diagonal in C0's basis.
    const Eigen::VectorXd damp = alpha / (probe.lambdas.array() + alpha);
    const double bias = (psi * damp.asDiagonal()).norm();
    const double bound = probe.rho * std::pow(alpha, exponent);
    out.push_back(BiasCheck{alpha, bias, bound, bias <= bound * (1.0 + 1e-12)});
  }
  return out;
}

std::vector<TheoryProbe> default_probes(int dim, std::uint64_t seed) {
  Eigen::VectorXd lambdas(dim);
  for (int k = 0; k < dim; ++k) lambdas(k) = 1.0 / double((k + 1) * (k + 1));
  std::vector<TheoryProbe> out;
  for (double beta : {0.25, 0.5, 1.0, 2.0}) {
    char name[64];
    std::snprintf(name, sizeof name, "beta=%g/diagonal", beta);
    out.push_back(TheoryProbe::make(name, beta, Eigen::MatrixXd::Identity(dim, dim), lambdas));

    NormalStream normal(derive_seed({seed, static_cast<std::uint64_t>(beta * 100)}));
    Eigen::MatrixXd dense(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) dense(i, j) = normal();
    std::snprintf(name, sizeof name, "beta=%g/dense", beta);
    out.push_back(TheoryProbe::make(name, beta, dense, lambdas));
  }
  return out;
}

}  // namespace farx

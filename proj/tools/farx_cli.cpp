// farx: simulate, fit, benchmark, rolling and verify commands.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "farx/error.hpp"
#include "farx/evaluation.hpp"
#include "farx/io.hpp"
#include "farx/methods.hpp"
#include "farx/preprocess.hpp"
#include "farx/random.hpp"
#include "farx/rolling.hpp"
#include "farx/simulator.hpp"
#include "farx/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using farx::io::format_double;

namespace {

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw farx::ConfigError("cannot create output directory " + dir.string());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw farx::ConfigError("cannot write " + p.string());
  return out;
}

json tuning_json(const farx::TuningRecord& t) {
  json j = json::object();
  if (t.tau) j["tau"] = *t.tau;
  if (t.k) j["k"] = *t.k;
  if (t.alpha) j["alpha"] = *t.alpha;
  return j;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string regime = "I";
  int n = 100;
  std::uint64_t seed = 0;
  fs::path out;
  std::string regime_config;
};

int cmd_simulate(const SimulateArgs& a) {
  farx::RegimeSpec spec = a.regime_config.empty() ? farx::RegimeSpec::named(a.regime)
                                                  : farx::io::regime_from_json(farx::io::read_json(a.regime_config));
  spec.validate();
  if (a.n < 2) throw farx::ConfigError("--n must be >= 2");
  prepare_dir(a.out);
  const auto op = farx::draw_regime_operator(spec, farx::operator_seed(a.seed, spec.id));
  const auto sample = farx::simulate_far1(op, spec, a.n, farx::path_seed(a.seed, spec.id, a.n, 0, 0));
  json extra{{"regime", farx::io::regime_to_json(spec)},
             {"seed", a.seed},
             {"n", a.n},
             {"operator_spectral_radius", op.spectral_radius},
             {"operator_norm", op.operator_norm}};
  farx::io::write_sample(a.out / "sample.csv", sample, extra);
  auto k = open_out(a.out / "true_kernel.csv");
  farx::io::write_matrix_csv(k, farx::true_kernel(op, sample.grid()).kernel);
  return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  fs::path input;
  std::string method;
  fs::path out;
  std::string cv = "holdout";
  int folds = 5;
  std::string alpha_grid = "default";
  double grid_scale = 1.0;
};

int cmd_fit(const FitArgs& a) {
  farx::MethodSpec method = farx::MethodSpec::parse(a.method);
  if (method.kind == farx::MethodSpec::Kind::tikhonov_cv) {
    if (a.cv == "forward") method.cv_scheme = farx::CvScheme::forward(a.folds);
    else if (a.cv != "holdout") throw farx::ConfigError("--cv must be holdout or forward");
    if (a.alpha_grid == "leading") method.grid_mode = farx::AlphaGridMode::leading_eigenvalue;
    else if (a.alpha_grid != "default") throw farx::ConfigError("--alpha-grid must be default or leading");
    method.grid_scale = a.grid_scale;
  }
  const farx::Sample sample = farx::io::read_sample(a.input);
  prepare_dir(a.out);
  const farx::FitOutcome fit = farx::fit_method(method, sample);

  auto k = open_out(a.out / "kernel.csv");
  farx::io::write_matrix_csv(k, fit.estimate.kernel);
  json meta{{"schema_version", farx::io::kSchemaVersion},
            {"kind", "operator_estimate"},
            {"input", a.input.string()},
            {"method", method.to_string()},
            {"label", method.label()},
            {"estimator", farx::to_string(fit.estimate.method)},
            {"tuning", tuning_json(fit.estimate.tuning)},
            {"grid_points", std::vector<double>(fit.estimate.grid.points().data(),
                                                fit.estimate.grid.points().data() + fit.estimate.grid.size())}};
  if (fit.cv) {
    meta["cv"] = farx::io::cv_to_json(*fit.cv);
    meta["cv"]["scheme"] = a.cv;
    if (a.cv == "forward") meta["cv"]["k"] = a.folds;
    meta["cv"]["alpha_grid"] = a.alpha_grid;
  }
  farx::io::write_json(a.out / "fit.meta.json", meta);
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchmarkArgs {
  std::string config;
  fs::path out;
  std::optional<int> threads;
  std::optional<int> replications;
  std::optional<std::uint64_t> seed;
};

// NaN (null in JSON) when the config has no Tikhonov-CV or a single sample size.
double rate_slope_or_nan(const std::vector<farx::CellSummary>& cells) {
  try {
    return farx::rate_slope(cells);
  } catch (const farx::DataError&) {
    return std::nan("");
  }
}

void write_benchmark(const farx::BenchmarkReport& report, const fs::path& dir) {
  {
    auto f = open_out(dir / "records.csv");
    farx::io::write_records_csv(f, report.records);
  }
  {
    auto f = open_out(dir / "timing.csv");
    farx::io::write_timing_csv(f, report.records);
  }
  const auto cells = farx::summarize(report);
  {
    auto f = open_out(dir / "cells.csv");
    f << "regime,n,method,count,failures,mean_misfe,stderr_misfe,mean_tuning,mean_hs_error\n";
    for (const auto& c : cells)
      f << c.regime << ',' << c.n << ',' << c.method << ',' << c.count << ',' << c.failures << ','
        << format_double(c.mean_misfe) << ',' << format_double(c.stderr_misfe) << ',' << format_double(c.mean_tuning)
        << ',' << format_double(c.mean_estimation_error) << '\n';
  }
  {
    auto f = open_out(dir / "regret.csv");
    f << "regime,n,method,regret_percent\n";
    for (const auto& r : farx::regret_table(cells, report.config.methods))
      f << r.regime << ',' << r.n << ',' << r.method << ',' << format_double(r.regret_percent) << '\n';
  }
  {
    auto f = open_out(dir / "worst_case.csv");
    f << "method,n,worst_mean_misfe,worst_regime\n";
    for (const auto& w : farx::worst_case_table(cells))
      f << w.method << ',' << w.n << ',' << format_double(w.worst_mean_misfe) << ',' << w.worst_regime << '\n';
  }
  {
    auto f = open_out(dir / "tuning.csv");
    f << "regime,n,method,mean_tuning\n";
    for (const auto& c : cells)
      f << c.regime << ',' << c.n << ',' << c.method << ',' << format_double(c.mean_tuning) << '\n';
  }
  int failures = 0;
  for (const auto& r : report.records) failures += r.ok ? 0 : 1;
  json slopes = json::object();
  for (const auto& [label, s] : farx::estimation_error_slopes(cells)) slopes[label] = s;
  const double slope = rate_slope_or_nan(cells);
  json summary{{"schema_version", farx::io::kSchemaVersion},
               {"kind", "benchmark_summary"},
               {"config", farx::io::benchmark_config_to_json(report.config)},
               {"records", report.records.size()},
               {"failures", failures},
               {"rate_slope", slope},
               {"estimation_error_slopes", slopes},
               {"timing", {{"wall_seconds", report.wall_seconds}}}};
  farx::io::write_json(dir / "summary.json", summary);
}

int cmd_benchmark(const BenchmarkArgs& a) {
  farx::BenchmarkConfig config = a.config.empty()
                                     ? farx::BenchmarkConfig::standard()
                                     : farx::io::benchmark_config_from_json(farx::io::read_json(a.config));
  if (a.threads) config.threads = *a.threads;
  if (a.replications) config.replications = *a.replications;
  if (a.seed) config.master_seed = *a.seed;
  config.validate();
  prepare_dir(a.out);
  const auto report = farx::run_benchmark(config);
  write_benchmark(report, a.out);
  const auto cells = farx::summarize(report);
  std::cout << "records " << report.records.size() << "  rate slope " << rate_slope_or_nan(cells) << "  wall "
            << report.wall_seconds << " s\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct RollingArgs {
  fs::path raw;
  fs::path out;
  int window = 100;
  int refit = 20;
  std::string gap_policy = "exclude-cross-gap";
  std::vector<std::string> methods;
};

int cmd_rolling(const RollingArgs& a) {
  farx::RollingConfig rc;
  rc.window = a.window;
  rc.refit_interval = a.refit;
  rc.gap_policy = farx::gap_policy_from_string(a.gap_policy);
  rc.validate();
  std::vector<farx::MethodSpec> methods;
  if (a.methods.empty()) methods = farx::application_methods();
  else
    for (const auto& m : a.methods) methods.push_back(farx::MethodSpec::parse(m));

  const farx::PipelineConfig pc;
  const auto raw = farx::load_halfhourly_csv(a.raw);
  const auto kept = farx::filter_and_interpolate(raw, pc);
  const auto pre = farx::preprocess_curves(kept, pc);
  prepare_dir(a.out);

  std::vector<farx::RollingResult> results;
  for (const auto& m : methods) results.push_back(farx::rolling_forecast(pre.sample, pre.dates, rc, m));

  {
    auto f = open_out(a.out / "daily_ise.csv");
    farx::io::write_rolling_header(f);
    for (const auto& r : results) farx::io::write_rolling_rows(f, r);
  }
  {
    auto f = open_out(a.out / "summary.csv");
    f << "method,evaluated,failed,mean_ise,median_ise,regret_percent\n";
    for (const auto& s : farx::summarize_rolling(results))
      f << s.method << ',' << s.evaluated << ',' << s.failed << ',' << format_double(s.mean_ise) << ','
        << format_double(s.median_ise) << ',' << format_double(s.regret_percent) << '\n';
  }
  {
    auto f = open_out(a.out / "weekday_means.csv");
    farx::io::write_weekday_table(f, pre.weekday_means);
  }
  json per_method = json::array();
  for (const auto& r : results)
    per_method.push_back(json{{"method", r.method},
                              {"forecasts", r.records.size()},
                              {"refits", r.refits},
                              {"skipped_cross_gap", r.skipped_cross_gap},
                              {"failed", r.failed}});
  json meta{{"schema_version", farx::io::kSchemaVersion},
            {"kind", "rolling_summary"},
            {"raw", a.raw.string()},
            {"raw_days", raw.size()},
            {"kept_days", kept.size()},
            {"window", rc.window},
            {"refit_interval", rc.refit_interval},
            {"gap_policy", farx::to_string(rc.gap_policy)},
            {"methods", per_method}};
  farx::io::write_json(a.out / "rolling.meta.json", meta);
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  fs::path out;
  std::string probes;
  double rho_scale = 1.0;
  bool quick = false;
};

// {"schema_version": 1, "probes": [{"name": "p", "beta": 0.5, "dim": 40,
//   "f": "diagonal" | "dense", "seed": 11, "lambda_decay": 2}]}
std::vector<farx::TheoryProbe> probes_from_json(const json& doc) {
  farx::io::require_schema(doc, "probe file");
  if (!doc.contains("probes") || !doc.at("probes").is_array()) throw farx::ConfigError("probe file: missing probes array");
  std::vector<farx::TheoryProbe> out;
  for (const auto& p : doc.at("probes")) {
    const int dim = p.value("dim", 40);
    const double decay = p.value("lambda_decay", 2.0);
    if (dim < 1) throw farx::ConfigError("probe dim must be >= 1");
    Eigen::VectorXd lambdas(dim);
    for (int k = 0; k < dim; ++k) lambdas(k) = std::pow(double(k + 1), -decay);
    Eigen::MatrixXd f;
    const std::string kind = p.value("f", std::string("diagonal"));
    if (kind == "diagonal") {
      f = Eigen::MatrixXd::Identity(dim, dim);
    } else if (kind == "dense") {
      farx::NormalStream normal(p.value("seed", std::uint64_t{11}));
      f.resize(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) f(i, j) = normal();
    } else {
      throw farx::ConfigError("probe f must be diagonal or dense");
    }
    out.push_back(farx::TheoryProbe::make(p.value("name", std::string("probe")), p.value("beta", 1.0), f, lambdas));
  }
  return out;
}

int cmd_verify(const VerifyArgs& a) {
  const auto probes = a.probes.empty() ? farx::default_probes() : probes_from_json(farx::io::read_json(a.probes));
  if (probes.empty()) throw farx::ConfigError("verify: probe list is empty");
  prepare_dir(a.out);

  std::vector<farx::verify::CheckResult> checks;
  checks.push_back(farx::verify::bias_bound_suite(probes, a.rho_scale));
  if (!a.quick) {
    checks.push_back(farx::verify::tikhonov_dense_equivalence());
    checks.push_back(farx::verify::fast_cv_equivalence());
    checks.push_back(farx::verify::fpca_tikhonov_limit_matched());
  }

  json report = json::array();
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  worst=" << c.worst << " tol=" << c.tolerance
              << " cases=" << c.cases << '\n';
    if (!c.passed) failed.push_back(c.name);
    report.push_back(json{{"name", c.name},
                          {"passed", c.passed},
                          {"worst", c.worst},
                          {"tolerance", c.tolerance},
                          {"cases", c.cases},
                          {"detail", c.detail},
                          {"seconds", c.seconds}});
  }
  farx::io::write_json(a.out / "verify.json", json{{"schema_version", farx::io::kSchemaVersion},
                                                   {"kind", "verification_report"},
                                                   {"rho_scale", a.rho_scale},
                                                   {"checks", report},
                                                   {"failed", failed}});
  if (!failed.empty()) {
    std::cerr << "failed:";
    for (const auto& f : failed) std::cerr << ' ' << f;
    std::cerr << '\n';
    return 1;
  }
  return 0;
}

void report_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"schema_version", farx::io::kSchemaVersion}, {"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional autoregression: FPCA and Tikhonov estimators, simulation and evaluation"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate a FAR(1) sample path");
  s->add_option("--regime", sim.regime, "I, II or III")->default_val("I");
  s->add_option("--regime-config", sim.regime_config, "JSON regime object (overrides --regime)");
  s->add_option("--n", sim.n, "number of curves")->required();
  s->add_option("--seed", sim.seed, "master seed")->required();
  s->add_option("--out", sim.out, "output directory")->required();

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Estimate the operator from a sample file");
  f->add_option("--input", fit.input, "sample CSV")->required()->check(CLI::ExistingFile);
  f->add_option("--method", fit.method, "fpca:TAU | fpca:K=INT | tikhonov:ALPHA | tikhonov:cv")->required();
  f->add_option("--out", fit.out, "output directory")->required();
  f->add_option("--cv", fit.cv, "holdout or forward")->default_val("holdout");
  f->add_option("--folds", fit.folds, "forward folds")->default_val(5);
  f->add_option("--alpha-grid", fit.alpha_grid, "default or leading")->default_val("default");
  f->add_option("--grid-scale", fit.grid_scale, "scale of the default alpha grid")->default_val(1.0);

  BenchmarkArgs bench;
  auto* b = app.add_subcommand("benchmark", "Run the Monte Carlo benchmark");
  b->add_option("--config", bench.config, "benchmark JSON config")->check(CLI::ExistingFile);
  b->add_option("--out", bench.out, "output directory")->required();
  b->add_option("--threads", bench.threads, "worker threads");
  b->add_option("--replications", bench.replications, "replications per cell");
  b->add_option("--seed", bench.seed, "master seed");

  RollingArgs roll;
  auto* r = app.add_subcommand("rolling", "Preprocess raw half-hourly data and run the rolling forecast");
  r->add_option("--raw", roll.raw, "raw CSV: date,h01..h48")->required()->check(CLI::ExistingFile);
  r->add_option("--out", roll.out, "output directory")->required();
  r->add_option("--window", roll.window, "training window")->default_val(100);
  r->add_option("--refit", roll.refit, "refit interval in evaluation days")->default_val(20);
  r->add_option("--gap-policy", roll.gap_policy, "exclude-cross-gap or contiguous")->default_val("exclude-cross-gap");
  r->add_option("--method", roll.methods, "method (repeatable); default: the six application methods");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Run the bias-bound probes and oracle checks");
  v->add_option("--out", ver.out, "output directory")->required();
  v->add_option("--probes", ver.probes, "probe JSON file")->check(CLI::ExistingFile);
  v->add_option("--rho-scale", ver.rho_scale, "multiplier on each probe's rho")->default_val(1.0);
  v->add_flag("--quick", ver.quick, "bias probes only");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return cmd_simulate(sim);
    if (*f) return cmd_fit(fit);
    if (*b) return cmd_benchmark(bench);
    if (*r) return cmd_rolling(roll);
    if (*v) return cmd_verify(ver);
  } catch (const farx::Error& e) {
    report_error(e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 3;
  }
  return 0;
}

// Acceptance run: one PASS/FAIL/SKIP line per criterion, exit status 1 when
// any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "farx/evaluation.hpp"
#include "farx/fpca.hpp"
#include "farx/io.hpp"
#include "farx/preprocess.hpp"
#include "farx/rolling.hpp"
#include "farx/verification.hpp"
#include "support/fixtures.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  enum class Status { pass, fail, skip } status = Status::fail;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::fail, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return ok ? pass(std::move(d)) : fail(std::move(d)); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string describe(const farx::verify::CheckResult& c) {
  std::ostringstream out;
  out << "worst=" << c.worst << " tol=" << c.tolerance << " cases=" << c.cases;
  return out.str();
}

// Runtime budget is part of criteria 1-4.
Outcome oracle_check(const farx::verify::CheckResult& c, double budget_seconds) {
  const bool in_time = c.seconds < budget_seconds;
  std::string d = describe(c) + fmt(" time=%.2fs", c.seconds) + fmt(" budget=%.0fs", budget_seconds);
  return verdict(c.passed && in_time, d);
}

// Shared by criteria 5-8 and 12.
struct BenchmarkRun {
  farx::BenchmarkReport report;
  std::vector<farx::CellSummary> cells;
  std::vector<farx::RegretEntry> regret;
  std::string records_csv;
};

BenchmarkRun run_default_benchmark(int threads) {
  farx::BenchmarkConfig config = farx::BenchmarkConfig::standard();
  config.threads = threads;
  BenchmarkRun run;
  run.report = farx::run_benchmark(config);
  run.cells = farx::summarize(run.report);
  run.regret = farx::regret_table(run.report);
  std::ostringstream out;
  farx::io::write_records_csv(out, run.report.records);
  run.records_csv = out.str();
  return run;
}

double regret_of(const BenchmarkRun& run, const std::string& regime, int n, const std::string& method) {
  for (const auto& r : run.regret)
    if (r.regime == regime && r.n == n && r.method == method) return r.regret_percent;
  throw farx::DataError("no regret entry for " + regime + "/" + std::to_string(n) + "/" + method);
}

const farx::CellSummary& cell_of(const BenchmarkRun& run, const std::string& regime, int n, const std::string& method) {
  for (const auto& c : run.cells)
    if (c.regime == regime && c.n == n && c.method == method) return c;
  throw farx::DataError("no cell " + regime + "/" + std::to_string(n) + "/" + method);
}

Outcome criterion_5(const BenchmarkRun& run) {
  const auto& cfg = run.report.config;
  std::vector<std::string> misses;
  std::ostringstream d;

  // (a) FPCA-95 and FPCA-99 hold the two largest regrets
  int a_bad = 0;
  for (const auto& regime : cfg.regimes) {
    for (int n : cfg.sample_sizes) {
      std::vector<std::pair<double, std::string>> ranked;
      for (const auto& m : cfg.methods) ranked.emplace_back(regret_of(run, regime.id, n, m.label()), m.label());
      std::sort(ranked.begin(), ranked.end(), std::greater<>());
      const bool ok = (ranked[0].second == "FPCA-95" || ranked[0].second == "FPCA-99") &&
                      (ranked[1].second == "FPCA-95" || ranked[1].second == "FPCA-99");
      if (!ok) {
        ++a_bad;
        d << " [a] " << regime.id << "/n=" << n << " top two " << ranked[0].second << "," << ranked[1].second;
      }
    }
  }
  if (a_bad) misses.push_back("a");

  // (b) FPCA-99 regret at n=100 above +10% in II and III
  for (const char* r : {"II", "III"}) {
    const double v = regret_of(run, r, 100, "FPCA-99");
    d << " [b] " << r << " FPCA-99 " << fmt("%+.1f%%", v);
    if (!(v > 10.0)) misses.push_back(std::string("b/") + r);
  }

  // (c) Tikhonov-CV regret at most +5% everywhere
  double worst_tik = -1e300;
  for (const auto& regime : cfg.regimes)
    for (int n : cfg.sample_sizes) worst_tik = std::max(worst_tik, regret_of(run, regime.id, n, "Tikhonov-CV"));
  d << " [c] max Tikhonov-CV " << fmt("%+.1f%%", worst_tik);
  if (!(worst_tik <= 5.0)) misses.push_back("c");

  // (d) Tikhonov-CV beats every FPCA rule in III at n=100
  const double d_val = regret_of(run, "III", 100, "Tikhonov-CV");
  d << " [d] III/n=100 Tikhonov-CV " << fmt("%+.1f%%", d_val);
  if (!(d_val < 0.0)) misses.push_back("d");

  std::string head;
  for (const auto& m : misses) head += (head.empty() ? "violated: " : ",") + m;
  return verdict(misses.empty(), (head.empty() ? "all parts hold;" : head + ";") + d.str());
}

Outcome criterion_6(const BenchmarkRun& run) {
  const auto worst = farx::worst_case_table(run.cells);
  std::ostringstream d;
  bool ok = true;
  for (int n : run.report.config.sample_sizes) {
    std::string best;
    double best_value = 1e300, tik = 0.0;
    for (const auto& w : worst) {
      if (w.n != n) continue;
      if (w.worst_mean_misfe < best_value) best_value = w.worst_mean_misfe, best = w.method;
      if (w.method == "Tikhonov-CV") tik = w.worst_mean_misfe;
    }
    d << " n=" << n << ":" << best << fmt("(%.4f)", best_value);
    if (best != "Tikhonov-CV") {
      ok = false;
      d << fmt(" vs Tikhonov-CV %.4f", tik);
    }
  }
  return verdict(ok, "smallest worst-case MISFE per n:" + d.str());
}

Outcome criterion_7(const BenchmarkRun& run) {
  const double slope = farx::rate_slope(run.cells);
  std::ostringstream d;
  d << fmt("slope=%.3f", slope) << " range=[-0.45,-0.15]; mean log10 alpha:";
  for (const auto& c : run.cells)
    if (c.method == "Tikhonov-CV") d << ' ' << c.regime << '/' << c.n << '=' << fmt("%.2f", c.mean_tuning);
  return verdict(slope >= -0.45 && slope <= -0.15, d.str());
}

Outcome criterion_8(const BenchmarkRun& run) {
  const auto& cfg = run.report.config;
  std::ostringstream d;
  bool ok = true;
  d << "Regime I mean K(0.80):";
  for (int n : cfg.sample_sizes) {
    const double k = cell_of(run, "I", n, "FPCA-80").mean_tuning;
    d << ' ' << fmt("%.2f", k);
    if (std::abs(k - 2.0) > 1.0) ok = false;
  }
  const double k3 = cell_of(run, "III", 800, "FPCA-80").mean_tuning;
  d << "; Regime III n=800 mean K(0.80) " << fmt("%.2f", k3) << " in [18,27]";
  if (k3 < 18.0 || k3 > 27.0) ok = false;
  d << "; log10 alpha decreasing:";
  for (const auto& regime : cfg.regimes) {
    bool mono = true;
    for (std::size_t i = 1; i < cfg.sample_sizes.size(); ++i)
      if (!(cell_of(run, regime.id, cfg.sample_sizes[i], "Tikhonov-CV").mean_tuning <
            cell_of(run, regime.id, cfg.sample_sizes[i - 1], "Tikhonov-CV").mean_tuning))
        mono = false;
    d << ' ' << regime.id << (mono ? "=yes" : "=no");
    if (!mono) {
      d << " (";
      for (std::size_t i = 0; i < cfg.sample_sizes.size(); ++i)
        d << (i ? " " : "") << fmt("%.4f", cell_of(run, regime.id, cfg.sample_sizes[i], "Tikhonov-CV").mean_tuning);
      d << ")";
    }
    ok = ok && mono;
  }
  return verdict(ok, d.str());
}

Outcome criterion_9() {
  Eigen::VectorXd shares(9);
  shares << 0.804, 0.091, 0.043, 0.016, 0.014, 0.012, 0.011, 0.005, 0.004;
  const int expected[] = {1, 2, 3, 4, 7};
  std::ostringstream d;
  bool ok = true;
  for (int i = 0; i < 5; ++i) {
    const int k = farx::select_k(shares, farx::kStandardThresholds[i]);
    d << (i ? "," : "K = {") << k;
    ok = ok && k == expected[i];
  }
  d << "} expected {1,2,3,4,7}";
  return verdict(ok, d.str());
}

farx::RawDayRecord flat_day(farx::Date d, int missing) {
  farx::RawDayRecord r;
  r.date = d;
  for (int s = 0; s < farx::kSlotsPerDay; ++s)
    r.values[static_cast<std::size_t>(s)] = s % 7 == 3 && s / 7 < missing ? std::nullopt : std::optional<double>(4.0);
  return r;
}

Outcome criterion_10() {
  using namespace std::chrono;
  std::ostringstream d;
  bool ok = true;

  // cubic reproduction through the smoother
  const farx::BSplineSmoother sm(10, farx::slot_midpoints(), 100);
  auto cubic = [](double u) { return 1.0 - 2.0 * u + 3.0 * u * u - 4.0 * u * u * u; };
  Eigen::VectorXd in(farx::kSlotsPerDay);
  for (int s = 0; s < farx::kSlotsPerDay; ++s) in(s) = cubic(farx::slot_midpoints()(s));
  const Eigen::VectorXd out = sm.smooth(in);
  double err = 0.0;
  for (int j = 0; j < 100; ++j) err = std::max(err, std::abs(out(j) - cubic(sm.output_grid().points()(j))));
  d << fmt("cubic max error %.2e", err);
  ok = ok && err <= 1e-8;

  // drop rules
  const farx::PipelineConfig cfg;
  auto ymd = [](int y, unsigned m, unsigned dd) { return farx::Date{year{y}, month{m}, day{dd}}; };
  const std::vector<farx::RawDayRecord> fixture = {
      flat_day(ymd(2020, 11, 2), 5),   // kept: five gaps
      flat_day(ymd(2020, 11, 3), 6),   // dropped: six gaps
      flat_day(ymd(2020, 12, 27), 0),  // kept
      flat_day(ymd(2020, 12, 28), 0),  // dropped: exclusion window
      flat_day(ymd(2021, 1, 1), 0),    // dropped
      flat_day(ymd(2021, 1, 7), 0),    // dropped
      flat_day(ymd(2021, 1, 8), 0),    // kept
      flat_day(ymd(2021, 4, 1), 0),    // dropped: out of season
  };
  const auto kept = farx::filter_and_interpolate(fixture, cfg);
  std::vector<std::string> kept_dates;
  for (const auto& r : kept) kept_dates.push_back(farx::format_iso_date(r.date));
  const std::vector<std::string> want = {"2020-11-02", "2020-12-27", "2021-01-08"};
  const bool interpolated = !kept.empty() && kept.front().complete() && *kept.front().values[3] == 4.0;
  d << "; drop rules keep " << kept_dates.size() << " of " << fixture.size() << (kept_dates == want ? " (as expected)" : " (unexpected)");
  ok = ok && kept_dates == want && interpolated;

  // rolling counts on a synthetic 150-day season
  std::istringstream raw(testing::winter_file(150));
  const auto season = farx::filter_and_interpolate(farx::parse_halfhourly_csv(raw), cfg);
  const auto pre = farx::preprocess_curves(season, cfg);
  const farx::RollingConfig rc;
  int predicted = 0;
  for (std::size_t t = static_cast<std::size_t>(rc.window); t < pre.dates.size(); ++t)
    predicted += sys_days{pre.dates[t]} - sys_days{pre.dates[t - 1]} == std::chrono::days{1} ? 1 : 0;
  const int predicted_refits = (predicted + rc.refit_interval - 1) / rc.refit_interval;
  const auto result = farx::rolling_forecast(pre.sample, pre.dates, rc, farx::MethodSpec::tikhonov(0.1));
  d << "; rolling " << result.records.size() << " forecasts / " << result.refits << " refits (predicted " << predicted
    << " / " << predicted_refits << ")";
  ok = ok && pre.sample.length() == 150 && static_cast<int>(result.records.size()) == predicted &&
       result.refits == predicted_refits;
  return verdict(ok, d.str());
}

Outcome criterion_11() {
  const char* path = std::getenv("FARX_VIENNA_CSV");
  if (!path || !*path) return {Outcome::Status::skip, "set FARX_VIENNA_CSV to the half-hourly data file to run"};
  const farx::PipelineConfig cfg;
  const auto pre = farx::preprocess_curves(farx::filter_and_interpolate(farx::load_halfhourly_csv(path), cfg), cfg);
  std::vector<farx::RollingResult> results;
  for (const auto& m : farx::application_methods())
    results.push_back(farx::rolling_forecast(pre.sample, pre.dates, farx::RollingConfig{}, m));
  const auto rows = farx::summarize_rolling(results);
  auto best = std::min_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.mean_ise < b.mean_ise; });
  auto worst = std::max_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.mean_ise < b.mean_ise; });
  double fpca80 = 0.0;
  std::ostringstream d;
  for (const auto& r : rows) {
    d << r.method << fmt("=%.4f ", r.mean_ise);
    if (r.method == "FPCA-80") fpca80 = r.regret_percent;
  }
  d << "; FPCA-80 regret " << fmt("%+.1f%%", fpca80);
  return verdict(best->method == "Tikhonov-CV" && worst->method == "FPCA-80" && fpca80 >= 5.0 && fpca80 <= 15.0,
                 d.str());
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* id, const char* title, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const char* tag = o.status == Outcome::Status::pass ? "PASS" : o.status == Outcome::Status::skip ? "SKIP" : "FAIL";
    if (o.status == Outcome::Status::fail) ++failures;
    std::printf("%s %-3s %s: %s (%.1fs)\n", tag, id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report("1", "Tikhonov spectral route vs dense solve",
         [] { return oracle_check(farx::verify::tikhonov_dense_equivalence(), 10.0); });
  report("2", "fast CV vs per-alpha refits", [] { return oracle_check(farx::verify::fast_cv_equivalence(), 30.0); });
  report("3", "FPCA K=M vs Tikhonov at vanishing alpha", [] {
    Outcome o = oracle_check(farx::verify::fpca_tikhonov_limit(), 10.0);
    const auto matched = farx::verify::fpca_tikhonov_limit_matched();
    o.detail += "; with Tikhonov moments over the same lag pairs: " + describe(matched) +
                (matched.passed ? " (agrees)" : " (disagrees)");
    return o;
  });
  report("4", "bias bound on source-condition probes",
         [] { return oracle_check(farx::verify::bias_bound_suite(farx::default_probes()), 5.0); });

  const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  BenchmarkRun first, second;
  std::string bench_error;
  const auto start = Clock::now();
  try {
    first = run_default_benchmark(threads);
  } catch (const std::exception& e) {
    bench_error = e.what();
  }
  const double bench_secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("INFO     default benchmark: %zu records, %.1fs wall on %d threads\n", first.report.records.size(),
              bench_secs, threads);
  auto with_bench = [&](const std::function<Outcome(const BenchmarkRun&)>& f) {
    return [&, f] { return bench_error.empty() ? f(first) : fail("benchmark failed: " + bench_error); };
  };
  report("5", "directional benchmark reproduction", with_bench(criterion_5));
  report("6", "worst-case dominance of Tikhonov-CV", with_bench(criterion_6));
  report("7", "rate slope of selected alpha", with_bench(criterion_7));
  report("8", "tuning scales", with_bench(criterion_8));
  report("9", "K(tau) case list", criterion_9);
  report("10", "preprocessing and rolling properties", criterion_10);
  report("11", "application ranking on supplied data", criterion_11);
  report("12", "determinism of the benchmark records", [&] {
    if (!bench_error.empty()) return fail("benchmark failed: " + bench_error);
    second = run_default_benchmark(threads);
    const bool same = first.records_csv == second.records_csv;
    return verdict(same, std::to_string(first.records_csv.size()) + " bytes, " +
                             (same ? "identical across runs" : "runs differ"));
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}

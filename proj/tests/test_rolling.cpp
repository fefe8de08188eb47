#include <sstream>

#include <doctest.h>

#include "farx/evaluation.hpp"
#include "farx/rolling.hpp"
#include "support/fixtures.hpp"
#include "support/helpers.hpp"

using namespace std::chrono;
using farx::Grid;
using farx::Sample;

namespace {

std::vector<farx::Date> consecutive_dates(int n, int gap_at = -1) {
  std::vector<farx::Date> out;
  sys_days d{farx::Date{year{2020}, month{10}, day{1}}};
  for (int t = 0; t < n; ++t) {
    if (t == gap_at) d += days{5};
    out.emplace_back(d);
    d += days{1};
  }
  return out;
}

farx::RollingConfig contiguous() {
  farx::RollingConfig c;
  c.gap_policy = farx::GapPolicy::contiguous;
  return c;
}

}  // namespace

TEST_SUITE("rolling") {

TEST_CASE("index arithmetic: 150 curves, window 100, refit 20") {
  const Sample s(Grid::uniform(9), testing::random_matrix(150, 9, 4));
  const auto r = farx::rolling_forecast(s, {}, contiguous(), farx::MethodSpec::tikhonov(0.1));
  REQUIRE(r.records.size() == 50);
  CHECK(r.refits == 3);
  std::vector<Eigen::Index> refit_at;
  for (const auto& rec : r.records)
    if (rec.refit) refit_at.push_back(rec.index);
  // 0-based positions 100, 120, 140 are evaluation days 101, 121, 141
  CHECK(refit_at == std::vector<Eigen::Index>{100, 120, 140});
  CHECK(r.records.front().index == 100);
  CHECK(r.records.back().index == 149);
}

TEST_CASE("forecasts use the operator fitted on the preceding window") {
  const Sample s(Grid::uniform(7), testing::random_matrix(130, 7, 6));
  const auto r = farx::rolling_forecast(s, {}, contiguous(), farx::MethodSpec::tikhonov(0.05));
  const auto op = farx::tikhonov_fit(s.slice(20, 100), 0.05);
  const auto& rec = r.records[25];  // t = 125, operator from the refit at t = 120
  REQUIRE(rec.index == 125);
  const Eigen::VectorXd f = farx::apply_kernel(op, s.curve(124).eval());
  CHECK(rec.ise == doctest::Approx(farx::ise(f, s.curve(125))).epsilon(1e-12));
}

TEST_CASE("full-season count") {
  const Sample s(Grid::uniform(5), testing::random_matrix(2735, 5, 1));
  const auto r = farx::rolling_forecast(s, {}, contiguous(), farx::MethodSpec::tikhonov(0.1));
  CHECK(r.records.size() == 2635);
}

TEST_CASE("constant series") {
  const Sample s(Grid::uniform(6), Eigen::MatrixXd::Constant(120, 6, 2.0));
  // zero centered variation: Tikhonov returns the zero operator
  const auto t = farx::rolling_forecast(s, {}, contiguous(), farx::MethodSpec::tikhonov(0.1));
  for (const auto& rec : t.records) CHECK(rec.ise == doctest::Approx(4.0));
  // FPCA cannot select K from an all-zero spectrum: every block fails, run continues
  const auto f = farx::rolling_forecast(s, {}, contiguous(), farx::MethodSpec::fpca_threshold(0.9));
  CHECK(f.records.size() == 20);
  CHECK(f.failed == 20);
}

TEST_CASE("a failed refit marks only its block") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(160, 6, 1.0);
  x.bottomRows(60) = testing::random_matrix(60, 6, 3);
  const Sample s(Grid::uniform(6), x);
  const auto r = farx::rolling_forecast(s, {}, contiguous(), farx::MethodSpec::fpca_threshold(0.9));
  REQUIRE(r.records.size() == 60);
  for (int i = 0; i < 20; ++i) CHECK_FALSE(r.records[i].ok);
  for (int i = 20; i < 60; ++i) CHECK(r.records[i].ok);
  CHECK(r.failed == 20);
}

TEST_CASE("gap policy") {
  const Sample s(Grid::uniform(5), testing::random_matrix(150, 5, 2));
  const auto dates = consecutive_dates(150, 120);
  farx::RollingConfig excl;
  const auto a = farx::rolling_forecast(s, dates, excl, farx::MethodSpec::tikhonov(0.1));
  CHECK(a.records.size() == 49);
  CHECK(a.skipped_cross_gap == 1);
  const auto b = farx::rolling_forecast(s, dates, contiguous(), farx::MethodSpec::tikhonov(0.1));
  CHECK(b.records.size() == 50);
  // refit schedule counts evaluation days, skipped or not
  CHECK(a.refits == 3);
  CHECK(farx::gap_policy_from_string("contiguous") == farx::GapPolicy::contiguous);
  CHECK_THROWS_AS(farx::gap_policy_from_string("drop"), farx::ConfigError);
}

TEST_CASE("errors") {
  const Sample s(Grid::uniform(5), testing::random_matrix(100, 5, 2));
  CHECK_THROWS_AS(farx::rolling_forecast(s, {}, contiguous(), farx::MethodSpec::tikhonov(0.1)),
                  farx::InsufficientDataError);
  const Sample t(Grid::uniform(5), testing::random_matrix(120, 5, 2));
  CHECK_THROWS_AS(farx::rolling_forecast(t, consecutive_dates(119), contiguous(), farx::MethodSpec::tikhonov(0.1)),
                  farx::DimensionError);
  farx::RollingConfig bad;
  bad.refit_interval = 0;
  CHECK_THROWS_AS(bad.validate(), farx::ConfigError);
}

TEST_CASE("summary table") {
  std::istringstream in(testing::winter_file(150));
  const auto kept = farx::filter_and_interpolate(farx::parse_halfhourly_csv(in), farx::PipelineConfig{});
  const auto pre = farx::preprocess_curves(kept, farx::PipelineConfig{});
  std::vector<farx::RollingResult> results;
  for (const auto& m : farx::application_methods())
    results.push_back(farx::rolling_forecast(pre.sample, pre.dates, farx::RollingConfig{}, m));
  REQUIRE(results.size() == 6);
  const auto rows = farx::summarize_rolling(results);
  double best = INFINITY;
  int zero = 0;
  for (const auto& r : rows) {
    CHECK(r.evaluated == 50);
    best = std::min(best, r.mean_ise);
    if (r.regret_percent == 0.0) ++zero;
    CHECK(r.regret_percent >= 0.0);
    CHECK(r.median_ise > 0.0);
  }
  CHECK(zero >= 1);
  CHECK(rows.back().method == "Tikhonov-CV");
}

}

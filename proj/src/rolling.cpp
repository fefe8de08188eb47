#include "farx/rolling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "farx/error.hpp"
#include "farx/evaluation.hpp"

namespace farx {

const char* to_string(GapPolicy p) { return p == GapPolicy::contiguous ? "contiguous" : "exclude-cross-gap"; }

GapPolicy gap_policy_from_string(const std::string& s) {
  if (s == "contiguous") return GapPolicy::contiguous;
  if (s == "exclude-cross-gap") return GapPolicy::exclude_cross_gap;
  throw ConfigError("gap policy must be exclude-cross-gap or contiguous (got '" + s + "')");
}

void RollingConfig::validate() const {
  if (window < 10) throw ConfigError("rolling window must be >= 10");
  if (refit_interval < 1) throw ConfigError("refit interval must be >= 1");
}

RollingResult rolling_forecast(const Sample& sample, const std::vector<Date>& dates, const RollingConfig& config,
                               const MethodSpec& method) {
  config.validate();
  const Eigen::Index total = sample.length();
  if (total <= config.window)
    throw InsufficientDataError("rolling: sample length " + std::to_string(total) + " must exceed window " +
                                std::to_string(config.window));
  if (!dates.empty() && static_cast<Eigen::Index>(dates.size()) != total)
    throw DimensionError("rolling: dates and sample differ in length");

  RollingResult result;
  result.method = method.label();
  std::optional<FitOutcome> fit;
  for (Eigen::Index t = config.window; t < total; ++t) {
    const bool refit_day = (t - config.window) % config.refit_interval == 0;
    if (refit_day) {
      ++result.refits;
      try {
        fit = fit_method(method, sample.slice(t - config.window, config.window));
      } catch (const Error&) {
        fit.reset();
      }
    }
    if (config.gap_policy == GapPolicy::exclude_cross_gap && !dates.empty()) {
      const auto gap = std::chrono::sys_days{dates[static_cast<std::size_t>(t)]} -
                       std::chrono::sys_days{dates[static_cast<std::size_t>(t - 1)]};
      if (gap.count() > 1) {
        ++result.skipped_cross_gap;
        continue;
      }
    }
    RollingRecord rec;
    rec.index = t;
    if (!dates.empty()) rec.date = dates[static_cast<std::size_t>(t)];
    rec.refit = refit_day;
    if (!fit) {
      rec.ok = false;
      ++result.failed;
    } else {
      const Eigen::VectorXd forecast = apply_kernel(fit->estimate, sample.curve(t - 1));
      rec.ise = ise(forecast, sample.curve(t));
      rec.tuning = fit->tuning;
    }
    result.records.push_back(rec);
  }
  return result;
}

std::vector<RollingSummaryRow> summarize_rolling(const std::vector<RollingResult>& results) {
  std::vector<RollingSummaryRow> rows;
  for (const auto& r : results) {
    RollingSummaryRow row;
    row.method = r.method;
    std::vector<double> values;
    for (const auto& rec : r.records) {
      if (rec.ok) values.push_back(rec.ise);
      else ++row.failed;
    }
    row.evaluated = static_cast<int>(values.size());
    if (!values.empty()) {
      double sum = 0.0;
      for (double v : values) sum += v;
      row.mean_ise = sum / double(values.size());
      std::sort(values.begin(), values.end());
      const std::size_t h = values.size() / 2;
      row.median_ise = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
    } else {
      row.mean_ise = row.median_ise = std::nan("");
    }
    rows.push_back(row);
  }
  double best = INFINITY;
  for (const auto& row : rows)
    if (row.evaluated > 0) best = std::min(best, row.mean_ise);
  for (auto& row : rows) {
    if (row.evaluated == 0 || !(best > 0.0)) {
      row.regret_percent = row.evaluated == 0 ? std::nan("") : 0.0;
      continue;
    }
    row.regret_percent = row.mean_ise == best ? 0.0 : 100.0 * (row.mean_ise - best) / best;
  }
  return rows;
}

std::vector<MethodSpec> application_methods() {
  std::vector<MethodSpec> out;
  for (double tau : kStandardThresholds) out.push_back(MethodSpec::fpca_threshold(tau));
  out.push_back(MethodSpec::tikhonov_application_cv(5));
  return out;
}

}  // namespace farx

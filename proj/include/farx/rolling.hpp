#pragma once

#include <string>
#include <vector>

#include "farx/methods.hpp"
#include "farx/moments.hpp"
#include "farx/preprocess.hpp"

namespace farx {

enum class GapPolicy { exclude_cross_gap, contiguous };

const char* to_string(GapPolicy p);
GapPolicy gap_policy_from_string(const std::string& s);

struct RollingConfig {
  int window = 100;
  int refit_interval = 20;  // counted in evaluation days
  GapPolicy gap_policy = GapPolicy::exclude_cross_gap;

  void validate() const;
};

struct RollingRecord {
  Eigen::Index index = 0;  // position of the forecast target in the sample
  std::optional<Date> date;
  bool ok = true;
  bool refit = false;      // estimator was refitted for this day
  double ise = 0.0;
  double tuning = 0.0;     // K or alpha of the operator in use
};

struct RollingResult {
  std::string method;
  std::vector<RollingRecord> records;  // in date order, skipped pairs omitted
  int refits = 0;
  int skipped_cross_gap = 0;
  int failed = 0;
};

/// One-step-ahead forecasts X^_t = Psi X_{t-1} for t >= window. The
/// operator is refitted on the `window` curves preceding t at the first
/// evaluation day and every `refit_interval` evaluation days after that.
/// `dates` may be empty (then gaps are never detected).
RollingResult rolling_forecast(const Sample& sample, const std::vector<Date>& dates, const RollingConfig& config,
                               const MethodSpec& method);

struct RollingSummaryRow {
  std::string method;
  int evaluated = 0;
  int failed = 0;
  double mean_ise = 0.0;
  double median_ise = 0.0;
  double regret_percent = 0.0;  // vs the lowest mean ISE
};

std::vector<RollingSummaryRow> summarize_rolling(const std::vector<RollingResult>& results);

/// FPCA-80 ... FPCA-99 and Tikhonov-CV with five-fold forward CV.
std::vector<MethodSpec> application_methods();

}  // namespace farx

#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "farx/moments.hpp"

namespace farx {

using Date = std::chrono::year_month_day;

inline constexpr int kSlotsPerDay = 48;

/// Parses YYYY-MM-DD; throws ParseError.
Date parse_iso_date(const std::string& text);
std::string format_iso_date(const Date& d);

/// One day of half-hourly readings; std::nullopt marks a missing slot.
struct RawDayRecord {
  Date date;
  std::array<std::optional<double>, kSlotsPerDay> values;

  int missing() const;
  bool complete() const { return missing() == 0; }
};

struct MonthDay {
  unsigned month = 1;
  unsigned day = 1;
};

/// Inclusive month/day window that may wrap across the new year.
bool in_window(const Date& d, MonthDay first, MonthDay last);

struct PipelineConfig {
  MonthDay season_first{10, 1};
  MonthDay season_last{3, 31};
  MonthDay exclude_first{12, 28};
  MonthDay exclude_last{1, 7};
  int max_missing = 5;
  int n_basis = 10;
  int output_points = 100;

  void validate() const;
};

/// Reads `date,h01,...,h48` (header must match exactly). Empty cells are
/// missing. Output is sorted by date; duplicate dates are a DataError.
std::vector<RawDayRecord> load_halfhourly_csv(const std::filesystem::path& path);
std::vector<RawDayRecord> parse_halfhourly_csv(std::istream& in, const std::string& source = "<stream>");

/// Keeps in-season days outside the exclusion window with at most
/// `max_missing` gaps, then fills gaps by linear interpolation in slot index
/// (flat extrapolation at the day's ends).
std::vector<RawDayRecord> filter_and_interpolate(const std::vector<RawDayRecord>& records,
                                                 const PipelineConfig& config);

/// Least-squares cubic B-spline smoother with uniform interior knots on
/// [0, 1], evaluated on a uniform output grid. A fixed linear map.
class BSplineSmoother {
 public:
  BSplineSmoother(int n_basis, const Eigen::VectorXd& abscissae, int output_points);

  /// n_basis cubic B-splines (clamped knots) evaluated at `u`.
  static Eigen::MatrixXd basis(int n_basis, const Eigen::VectorXd& u);

  Eigen::VectorXd smooth(const Eigen::VectorXd& values) const;
  /// Row-wise smoothing of an (n x inputs) matrix.
  Eigen::MatrixXd smooth_rows(const Eigen::MatrixXd& values) const;

  const Eigen::MatrixXd& operator_matrix() const { return hat_; }
  const Grid& output_grid() const { return grid_; }

 private:
  Grid grid_;
  Eigen::MatrixXd hat_;  // output_points x inputs
};

/// Slot midpoints (s + 0.5) / 48 for s = 0..47.
Eigen::VectorXd slot_midpoints();

/// Monday = 0 ... Sunday = 6.
int weekday_index(const Date& d);

struct PreprocessResult {
  Sample sample;
  std::vector<Date> dates;
  Eigen::MatrixXd weekday_means;  // 7 x 48 on the square-root scale
  std::vector<int> weekday_counts;
};

/// Square root, subtraction of the day-of-week mean (over all given
/// records), and B-spline smoothing onto the output grid.
PreprocessResult preprocess_curves(const std::vector<RawDayRecord>& complete, const PipelineConfig& config);

/// Same pipeline with a supplied weekday-mean table.
Eigen::MatrixXd center_and_smooth(const std::vector<RawDayRecord>& complete, const Eigen::MatrixXd& weekday_means,
                                  const BSplineSmoother& smoother);

}  // namespace farx

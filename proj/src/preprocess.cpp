#include "farx/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "farx/error.hpp"

namespace farx {

namespace sc = std::chrono;

Date parse_iso_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  auto bad = [&] { return ParseError("invalid ISO date '" + text + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    if (ec != std::errc() || ptr != text.data() + pos + len) throw bad();
  };
  num(0, 4, y);
  num(5, 2, m);
  num(8, 2, d);
  const Date date{sc::year{y}, sc::month{m}, sc::day{d}};
  if (!date.ok()) throw bad();
  return date;
}

std::string format_iso_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(d.year()), unsigned(d.month()), unsigned(d.day()));
  return buf;
}

int RawDayRecord::missing() const {
  return static_cast<int>(std::count_if(values.begin(), values.end(), [](const auto& v) { return !v.has_value(); }));
}

bool in_window(const Date& d, MonthDay first, MonthDay last) {
  const unsigned key = unsigned(d.month()) * 100 + unsigned(d.day());
  const unsigned lo = first.month * 100 + first.day;
  const unsigned hi = last.month * 100 + last.day;
  return lo <= hi ? (key >= lo && key <= hi) : (key >= lo || key <= hi);
}

void PipelineConfig::validate() const {
  if (max_missing < 0 || max_missing >= kSlotsPerDay) throw ConfigError("max_missing must lie in [0, 48)");
  if (n_basis < 4) throw ConfigError("n_basis must be >= 4 for cubic splines");
  if (output_points < n_basis) throw ConfigError("output_points must be >= n_basis");
  for (const MonthDay md : {season_first, season_last, exclude_first, exclude_last})
    if (md.month < 1 || md.month > 12 || md.day < 1 || md.day > 31) throw ConfigError("invalid month/day in window");
}

std::vector<RawDayRecord> parse_halfhourly_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::string expected = "date";
  for (int s = 1; s <= kSlotsPerDay; ++s) {
    char buf[8];
    std::snprintf(buf, sizeof buf, ",h%02d", s);
    expected += buf;
  }
  if (!std::getline(in, line)) throw ParseError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw ParseError(source + ":1: header must be exactly date,h01,...,h48");

  std::vector<RawDayRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != kSlotsPerDay + 1)
      throw ParseError(where + ": expected 49 fields, found " + std::to_string(cells.size()));
    RawDayRecord rec;
    try {
      rec.date = parse_iso_date(cells[0]);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    for (int s = 0; s < kSlotsPerDay; ++s) {
      const std::string& c = cells[static_cast<std::size_t>(s) + 1];
      if (c.empty()) continue;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size() || !std::isfinite(v))
        throw ParseError(where + ": cannot parse value '" + c + "' in slot " + std::to_string(s + 1));
      if (v < 0.0) throw ParseError(where + ": negative concentration in slot " + std::to_string(s + 1));
      rec.values[static_cast<std::size_t>(s)] = v;
    }
    out.push_back(rec);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].date == out[i - 1].date)
      throw DataError(source + ": duplicate date " + format_iso_date(out[i].date));
  return out;
}

std::vector<RawDayRecord> load_halfhourly_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_halfhourly_csv(in, path.string());
}

std::vector<RawDayRecord> filter_and_interpolate(const std::vector<RawDayRecord>& records,
                                                 const PipelineConfig& config) {
  config.validate();
  std::vector<RawDayRecord> out;
  for (const auto& rec : records) {
    if (!in_window(rec.date, config.season_first, config.season_last)) continue;
    if (in_window(rec.date, config.exclude_first, config.exclude_last)) continue;
    if (rec.missing() > config.max_missing) continue;

    RawDayRecord filled = rec;
    std::vector<int> present;
    for (int s = 0; s < kSlotsPerDay; ++s)
      if (rec.values[static_cast<std::size_t>(s)]) present.push_back(s);
    if (present.empty()) continue;
    for (int s = 0; s < kSlotsPerDay; ++s) {
      auto& v = filled.values[static_cast<std::size_t>(s)];
      if (v) continue;
      const auto hi = std::lower_bound(present.begin(), present.end(), s);
      if (hi == present.begin()) {
        v = *rec.values[static_cast<std::size_t>(present.front())];
      } else if (hi == present.end()) {
        v = *rec.values[static_cast<std::size_t>(present.back())];
      } else {
        const int a = *(hi - 1), b = *hi;
        const double va = *rec.values[static_cast<std::size_t>(a)];
        const double vb = *rec.values[static_cast<std::size_t>(b)];
        v = va + (vb - va) * double(s - a) / double(b - a);
      }
    }
    out.push_back(filled);
  }
  return out;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd BSplineSmoother::basis(int n_basis, const Eigen::VectorXd& u) {
  constexpr int p = 3;
  if (n_basis < p + 1) throw ArgumentError("B-spline basis needs at least 4 functions");
  // Clamped knot vector with n_basis - 4 uniform interior knots.
  const int intervals = n_basis - p;
  std::vector<double> knots;
  for (int i = 0; i < p; ++i) knots.push_back(0.0);
  for (int i = 0; i <= intervals; ++i) knots.push_back(double(i) / double(intervals));
  for (int i = 0; i < p; ++i) knots.push_back(1.0);

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(u.size(), n_basis);
  for (Eigen::Index r = 0; r < u.size(); ++r) {
    const double x = u(r);
    if (x < 0.0 || x > 1.0) throw ArgumentError("B-spline abscissa outside [0, 1]");
    // Knot span with t_span <= x < t_{span+1}; x = 1 uses the last span.
    int span = p + std::min(static_cast<int>(x * intervals), intervals - 1);
    while (span > p && x < knots[static_cast<std::size_t>(span)]) --span;
    while (span < p + intervals - 1 && x >= knots[static_cast<std::size_t>(span) + 1]) ++span;

    // Cox-de Boor triangle (non-zero functions span-p..span).
    double n[p + 1] = {1.0, 0.0, 0.0, 0.0};
    double left[p + 1], right[p + 1];
    for (int j = 1; j <= p; ++j) {
      left[j] = x - knots[static_cast<std::size_t>(span + 1 - j)];
      right[j] = knots[static_cast<std::size_t>(span + j)] - x;
      double saved = 0.0;
      for (int k = 0; k < j; ++k) {
        const double temp = n[k] / (right[k + 1] + left[j - k]);
        n[k] = saved + right[k + 1] * temp;
        saved = left[j - k] * temp;
      }
      n[j] = saved;
    }
    for (int j = 0; j <= p; ++j) b(r, span - p + j) = n[j];
  }
  return b;
}

BSplineSmoother::BSplineSmoother(int n_basis, const Eigen::VectorXd& abscissae, int output_points)
    : grid_(Grid::uniform(output_points)) {
  const Eigen::MatrixXd design = basis(n_basis, abscissae);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() != n_basis) throw NumericalError("B-spline design matrix is rank deficient");
  // hat = E (B^T B)^{-1} B^T, via the least-squares solve against identity.
  const Eigen::MatrixXd coef_map = qr.solve(Eigen::MatrixXd::Identity(abscissae.size(), abscissae.size()));
  hat_ = basis(n_basis, grid_.points()) * coef_map;
}

Eigen::VectorXd BSplineSmoother::smooth(const Eigen::VectorXd& values) const {
  if (values.size() != hat_.cols()) throw DimensionError("smooth: wrong number of input values");
  return hat_ * values;
}

Eigen::MatrixXd BSplineSmoother::smooth_rows(const Eigen::MatrixXd& values) const {
  if (values.cols() != hat_.cols()) throw DimensionError("smooth_rows: wrong number of input values");
  return values * hat_.transpose();
}

Eigen::VectorXd slot_midpoints() {
  Eigen::VectorXd u(kSlotsPerDay);
  for (int s = 0; s < kSlotsPerDay; ++s) u(s) = (double(s) + 0.5) / double(kSlotsPerDay);
  return u;
}

int weekday_index(const Date& d) {
  // iso_encoding: Monday = 1 ... Sunday = 7
  return static_cast<int>(sc::weekday{sc::sys_days{d}}.iso_encoding()) - 1;
}

namespace {

Eigen::MatrixXd sqrt_matrix(const std::vector<RawDayRecord>& records) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(records.size()), kSlotsPerDay);
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (int s = 0; s < kSlotsPerDay; ++s) {
      const auto& v = records[i].values[static_cast<std::size_t>(s)];
      if (!v) throw DataError("preprocess: record " + format_iso_date(records[i].date) + " is incomplete");
      out(static_cast<Eigen::Index>(i), s) = std::sqrt(*v);
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd center_and_smooth(const std::vector<RawDayRecord>& complete, const Eigen::MatrixXd& weekday_means,
                                  const BSplineSmoother& smoother) {
  if (weekday_means.rows() != 7 || weekday_means.cols() != kSlotsPerDay)
    throw DimensionError("weekday mean table must be 7 x 48");
  Eigen::MatrixXd roots = sqrt_matrix(complete);
  for (std::size_t i = 0; i < complete.size(); ++i)
    roots.row(static_cast<Eigen::Index>(i)) -= weekday_means.row(weekday_index(complete[i].date));
  return smoother.smooth_rows(roots);
}

PreprocessResult preprocess_curves(const std::vector<RawDayRecord>& complete, const PipelineConfig& config) {
  config.validate();
  if (complete.size() < 14)
    throw InsufficientDataError("preprocess needs at least 14 complete days (got " + std::to_string(complete.size()) +
                                ")");
  const Eigen::MatrixXd roots = sqrt_matrix(complete);
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(7, kSlotsPerDay);
  std::vector<int> counts(7, 0);
  for (std::size_t i = 0; i < complete.size(); ++i) {
    const int w = weekday_index(complete[i].date);
    means.row(w) += roots.row(static_cast<Eigen::Index>(i));
    ++counts[static_cast<std::size_t>(w)];
  }
  for (int w = 0; w < 7; ++w)
    if (counts[static_cast<std::size_t>(w)] > 0) means.row(w) /= double(counts[static_cast<std::size_t>(w)]);

  const BSplineSmoother smoother(config.n_basis, slot_midpoints(), config.output_points);
  Eigen::MatrixXd curves = center_and_smooth(complete, means, smoother);
  std::vector<Date> dates;
  for (const auto& r : complete) dates.push_back(r.date);
  return PreprocessResult{Sample(smoother.output_grid(), std::move(curves)), std::move(dates), std::move(means),
                          std::move(counts)};
}

}  // namespace farx

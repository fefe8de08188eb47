#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "farx/preprocess.hpp"

namespace testing {

inline std::string halfhourly_header() {
  std::string h = "date";
  char buf[8];
  for (int s = 1; s <= 48; ++s) {
    std::snprintf(buf, sizeof buf, ",h%02d", s);
    h += buf;
  }
  return h + "\n";
}

/// One CSV row; `value(s)` < 0 leaves slot s empty.
inline std::string halfhourly_row(const std::string& date, const std::function<double(int)>& value) {
  std::ostringstream out;
  out << date;
  for (int s = 0; s < 48; ++s) {
    out << ',';
    const double v = value(s);
    if (v >= 0.0) out << v;
  }
  out << '\n';
  return out.str();
}

/// `days` consecutive in-season rows starting at `first`, skipping the
/// holiday exclusion window, with a smooth daily profile plus a slow
/// day-to-day oscillation.
inline std::string winter_file(int days, farx::Date first = farx::Date{std::chrono::year{2020}, std::chrono::month{10},
                                                                       std::chrono::day{1}}) {
  std::string text = halfhourly_header();
  std::chrono::sys_days d{first};
  int written = 0;
  while (written < days) {
    const farx::Date ymd{d};
    const unsigned m = unsigned(ymd.month()), dd = unsigned(ymd.day());
    const bool holiday = (m == 12 && dd >= 28) || (m == 1 && dd <= 7);
    const bool season = m >= 10 || m <= 3;
    if (season && !holiday) {
      const int k = written;
      text += halfhourly_row(farx::format_iso_date(ymd), [k](int s) {
        return 25.0 + 8.0 * std::sin(2.0 * M_PI * s / 48.0) + 4.0 * std::sin(k / 5.0) + 0.5 * std::cos(0.7 * k * (s + 1));
      });
      ++written;
    }
    d += std::chrono::days{1};
  }
  return text;
}

}  // namespace testing

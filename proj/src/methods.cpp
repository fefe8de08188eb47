#include "farx/methods.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "farx/error.hpp"
#include "farx/fpca.hpp"

namespace farx {

MethodSpec MethodSpec::fpca_threshold(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("fpca threshold must lie in (0, 1]");
  MethodSpec m;
  m.kind = Kind::fpca_tau;
  m.value = tau;
  return m;
}

MethodSpec MethodSpec::fpca_components(int k) {
  if (k < 1) throw ArgumentError("fpca K must be >= 1");
  MethodSpec m;
  m.kind = Kind::fpca_k;
  m.value = k;
  return m;
}

MethodSpec MethodSpec::tikhonov(double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("tikhonov alpha must be positive");
  MethodSpec m;
  m.kind = Kind::tikhonov_fixed;
  m.value = alpha;
  return m;
}

MethodSpec MethodSpec::tikhonov_holdout_cv(double scale) {
  MethodSpec m;
  m.kind = Kind::tikhonov_cv;
  m.grid_scale = scale;
  return m;
}

MethodSpec MethodSpec::tikhonov_application_cv(int folds) {
  MethodSpec m;
  m.kind = Kind::tikhonov_cv;
  m.cv_scheme = CvScheme::forward(folds);
  m.grid_mode = AlphaGridMode::leading_eigenvalue;
  return m;
}

namespace {

double parse_number(const std::string& s, const std::string& whole) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("cannot parse number '" + s + "' in method '" + whole + "'");
  return v;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

MethodSpec MethodSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("method '" + text + "' must look like family:parameter");
  const std::string family = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  if (family == "fpca") {
    if (arg.rfind("K=", 0) == 0) {
      const double k = parse_number(arg.substr(2), text);
      if (k != std::floor(k) || k < 1) throw ConfigError("method '" + text + "': K must be a positive integer");
      return fpca_components(static_cast<int>(k));
    }
    const double tau = parse_number(arg, text);
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("method '" + text + "': tau must lie in (0, 1]");
    return fpca_threshold(tau);
  }
  if (family == "tikhonov") {
    if (arg == "cv") return tikhonov_holdout_cv();
    const double alpha = parse_number(arg, text);
    if (!(alpha > 0.0)) throw ConfigError("method '" + text + "': alpha must be positive");
    return tikhonov(alpha);
  }
  throw ConfigError("unknown method family '" + family + "' (expected fpca or tikhonov)");
}

std::string MethodSpec::label() const {
  switch (kind) {
    case Kind::fpca_tau: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "FPCA-%g", std::round(value * 1000.0) / 10.0);
      return buf;
    }
    case Kind::fpca_k: return "FPCA-K" + std::to_string(static_cast<int>(value));
    case Kind::tikhonov_fixed: return "Tikhonov-" + shortest(value);
    case Kind::tikhonov_cv: return "Tikhonov-CV";
  }
  return "unknown";
}

std::string MethodSpec::to_string() const {
  switch (kind) {
    case Kind::fpca_tau: return "fpca:" + shortest(value);
    case Kind::fpca_k: return "fpca:K=" + std::to_string(static_cast<int>(value));
    case Kind::tikhonov_fixed: return "tikhonov:" + shortest(value);
    case Kind::tikhonov_cv: return "tikhonov:cv";
  }
  return "unknown";
}

FitOutcome fit_method(const MethodSpec& method, const Sample& sample) {
  switch (method.kind) {
    case MethodSpec::Kind::fpca_tau: {
      auto op = fpca_far_fit(sample, Truncation::threshold(method.value));
      const double k = *op.tuning.k;
      return FitOutcome{std::move(op), k, std::nullopt};
    }
    case MethodSpec::Kind::fpca_k: {
      auto op = fpca_far_fit(sample, Truncation::components(static_cast<int>(method.value)));
      return FitOutcome{std::move(op), method.value, std::nullopt};
    }
    case MethodSpec::Kind::tikhonov_fixed:
      return FitOutcome{tikhonov_fit(sample, method.value), method.value, std::nullopt};
    case MethodSpec::Kind::tikhonov_cv: {
      const auto moments = weighted_moments(sample);
      const auto spectrum = eigendecompose(moments);
      AlphaGrid grid;
      if (method.grid_mode == AlphaGridMode::leading_eigenvalue) {
        // Scale from the training window the CV actually sees.
        grid = application_alpha_grid(spectrum.eigenvalues(0));
      } else {
        grid = default_alpha_grid(method.grid_scale);
      }
      CvResult cv = cv_select_alpha(sample, grid, method.cv_scheme);
      const double alpha = cv.selected_alpha;
      return FitOutcome{tikhonov_fit(moments, spectrum, alpha), alpha, std::move(cv)};
    }
  }
  throw ArgumentError("fit_method: unknown method kind");
}

}  // namespace farx

#pragma once

#include <optional>
#include <string>

#include "farx/moments.hpp"
#include "farx/tikhonov.hpp"

namespace farx {

/// How Tikhonov-CV builds its candidate grid.
enum class AlphaGridMode { fixed_scale, leading_eigenvalue };

/// An estimator together with its tuning rule, e.g. "fpca:0.90",
/// "fpca:K=3", "tikhonov:0.1" or "tikhonov:cv".
struct MethodSpec {
  enum class Kind { fpca_tau, fpca_k, tikhonov_fixed, tikhonov_cv };
  Kind kind = Kind::tikhonov_cv;
  double value = 0.0;  // tau, K, or alpha
  CvScheme cv_scheme = CvScheme::holdout();
  AlphaGridMode grid_mode = AlphaGridMode::fixed_scale;
  double grid_scale = 1.0;

  static MethodSpec fpca_threshold(double tau);
  static MethodSpec fpca_components(int k);
  static MethodSpec tikhonov(double alpha);
  static MethodSpec tikhonov_holdout_cv(double scale = 1.0);
  /// Five-fold forward CV over the 30-point grid scaled by the leading eigenvalue.
  static MethodSpec tikhonov_application_cv(int folds = 5);

  /// Parses "fpca:TAU", "fpca:K=INT", "tikhonov:ALPHA", "tikhonov:cv".
  static MethodSpec parse(const std::string& text);

  /// Display label: FPCA-80, FPCA-K3, Tikhonov-0.1, Tikhonov-CV.
  std::string label() const;
  /// Round-trippable form accepted by parse().
  std::string to_string() const;
  bool is_fpca() const { return kind == Kind::fpca_tau || kind == Kind::fpca_k; }
};

/// The five variance thresholds used throughout: 0.80 ... 0.99.
inline constexpr double kStandardThresholds[] = {0.80, 0.85, 0.90, 0.95, 0.99};

struct FitOutcome {
  Operator estimate;
  /// Resolved K for FPCA methods, alpha for Tikhonov methods.
  double tuning = 0.0;
  std::optional<CvResult> cv;
};

/// Fits `method` to `sample`. Tikhonov-CV selects alpha on the sample and
/// refits on all of it at the selected value.
FitOutcome fit_method(const MethodSpec& method, const Sample& sample);

}  // namespace farx

#pragma once

#include <string>
#include <vector>

#include "bioquake/core.hpp"

namespace bioquake {

enum class PlanMode { exact, approx };

struct PlanRequest {
  double error_rate = 0.0;
  double target_delta = 0.0;
  double alpha = 0.05;
  PlanMode mode = PlanMode::approx;
  /// Exact mode only: also require every sampled N' in [N, 4N] to meet the target.
  bool conservative = false;

  void validate() const;
};

/// Upper limit of the exact search. Targets below 1/(2 * kMaxComparisons)
/// are rejected as infeasible.
inline constexpr Count kMaxComparisons = 1'000'000'000'000;

/// Relative uncertainty of the 6% rule, the default for auditing published tables.
inline constexpr double kSixPercentRule = 0.061;

/// ceil(z^2 (1 - ER) / (ER delta^2)) with z the two-sided normal quantile.
Count required_comparisons_approx(const PlanRequest& req);

/// Smallest N whose exact acceptance region gives delta_rel <= target.
///
/// delta(N) has an integer sawtooth, so "smallest" is established by bracketed
/// bisection from the closed-form estimate, then refined: below 4096 the range
/// [1, N] is scanned exhaustively, above it a window of 4096 values below the
/// bisection boundary is scanned. With `conservative`, the answer is pushed
/// past every sampled N' in [N, 4N] that misses the target.
Count required_comparisons_exact(const PlanRequest& req);

/// Dispatches on req.mode.
Count required_comparisons(const PlanRequest& req);

/// z^2 / delta^2: the small-ER limit of required_comparisons_approx * ER.
double rule_constant(double delta, double alpha);

/// Numerator used by min_reportable_error: the published 10^3 for the 6%
/// rule at 95% confidence, rule_constant(delta, alpha) otherwise.
double rule_numerator(double delta, double alpha);

/// rule_numerator(delta, alpha) / NC, capped at 1.
double min_reportable_error(Count comparisons, double delta = kSixPercentRule,
                            double alpha = 0.05);

/// One significant figure, round-half-to-even on the shortest decimal
/// representation of the value.
struct OneSigFig {
  int mantissa = 0;  // 1..9
  int exponent = 0;
  bool capped = false;  // value >= 1
};
OneSigFig one_significant_figure(double value);

/// "3×10⁻¹", or "≥1" once the value reaches 1.
std::string format_min_error(double value);
/// "3e-1", or ">=1".
std::string format_min_error_ascii(double value);

struct CurveSpec {
  std::vector<double> deltas;
  double alpha = 0.05;
  double error_low = 1e-5;
  double error_high = 0.5;
  int points = 50;
  PlanMode mode = PlanMode::approx;

  void validate() const;
};

struct CurveRow {
  double error_rate = 0.0;
  double delta = 0.0;
  double confidence = 0.0;
  Count required_comparisons = 0;
};

/// Rows ordered by delta, then error rate, both ascending, over a log-spaced grid.
std::vector<CurveRow> curve(const CurveSpec& spec);

/// Header `error_rate,delta,confidence,required_comparisons`; reals in plain
/// decimal notation with 6 significant digits.
std::string curve_csv(const std::vector<CurveRow>& rows);

/// Plain decimal (never scientific) with `digits` significant digits.
std::string decimal_significant(double value, int digits = 6);

}  // namespace bioquake

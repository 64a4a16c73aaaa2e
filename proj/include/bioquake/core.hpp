#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bioquake {

/// Raised when an argument violates a documented precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Comparison and error counts. Published datasets reach ~3.3e11 pairs.
using Count = std::int64_t;

/// A measured error context: N comparisons, n observed errors (optional),
/// the binomial rate p, and alpha (confidence level is 1 - alpha).
struct ErrorObservation {
  Count comparisons = 0;
  std::optional<Count> errors;
  double rate = 0.0;
  double alpha = 0.05;

  static ErrorObservation from_rate(Count comparisons, double rate, double alpha);
  static ErrorObservation from_counts(Count comparisons, Count errors, double alpha);
  /// Both supplied; requires |rate - errors/comparisons| < 1/(2N).
  static ErrorObservation from_counts_and_rate(Count comparisons, Count errors, double rate,
                                               double alpha);

  void validate() const;
};

/// Integer error counts [n_low, n_high] consistent with the rate at 1 - alpha,
/// plus the achieved tail masses P(X < n_low) and P(X > n_high).
struct AcceptanceRegion {
  Count n_low = 0;
  Count n_high = 0;
  double tail_low = 0.0;
  double tail_high = 0.0;
};

enum class CertaintyClass { APlus, A, B, C, D, E, F };

struct UncertaintyResult {
  Count comparisons = 0;
  double rate = 0.0;
  double alpha = 0.05;
  AcceptanceRegion region;
  double delta_abs = 0.0;
  /// Empty when rate == 0: the relative uncertainty is undefined (unbounded).
  std::optional<double> delta_rel;
  double interval_low = 0.0;
  double interval_high = 0.0;
  CertaintyClass certainty_class = CertaintyClass::F;

  [[nodiscard]] bool delta_defined() const { return delta_rel.has_value(); }
};

struct UncertaintyBounds {
  double delta_abs_max = 0.5;
  double delta_abs_min = 0.0;
  double delta_rel_min = 0.0;
};

/// ln P(X = n) for X ~ Binomial(N, p). Returns -infinity for impossible
/// counts under degenerate p.
double binomial_log_pmf(Count comparisons, Count errors, double rate);

/// P(X <= n), through the incomplete beta identity I_{1-p}(N - n, n + 1).
double binomial_cdf(Count comparisons, Count errors, double rate);

/// P(X > n), computed directly rather than as 1 - cdf.
double binomial_sf(Count comparisons, Count errors, double rate);

/// n_low: largest n with P(X <= n - 1) <= alpha/2.
/// n_high: smallest n with P(X > n) <= alpha/2.
/// Both found by bracketed bisection on the monotone tails.
AcceptanceRegion acceptance_region(const ErrorObservation& obs);

/// Absolute uncertainty (n_high - n_low) / 2N, relative uncertainty
/// delta_abs / rate and the certainty class.
UncertaintyResult bioquake(const ErrorObservation& obs);

/// Class thresholds: A+ < 0.01 <= A < 0.05 <= B < 0.10 <= C < 0.30 <= D < 0.50
/// <= E < 1.00 <= F. An undefined delta maps to F.
CertaintyClass classify(double delta_rel);
CertaintyClass classify(std::optional<double> delta_rel);

/// Nominal bounds (1/2, 1/(2N), 1/(2N)) for a region of nonzero width.
UncertaintyBounds bounds(Count comparisons);

std::string_view class_label(CertaintyClass c);  // "A+", "A", ...
std::string_view class_name(CertaintyClass c);   // "Optimal", "Excellent", ...
std::string_view class_color(CertaintyClass c);  // legend color name
std::string_view class_hex(CertaintyClass c);    // legend color as #rrggbb
std::optional<CertaintyClass> parse_class_label(std::string_view label);

/// "A+ (Optimal)".
std::string class_display(CertaintyClass c);

}  // namespace bioquake

#include "bioquake/planner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bioquake/special.hpp"

namespace bioquake {

namespace {

constexpr Count kExhaustiveLimit = 4096;
constexpr Count kRefineWindow = 4096;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  }
}

Count closed_form(const PlanRequest& req) {
  const double z = special::two_sided_z(req.alpha);
  const double n = z * z * (1.0 - req.error_rate) /
                   (req.error_rate * req.target_delta * req.target_delta);
  if (!(n < 9.0e18)) {
    throw DomainError(fmt::format("required comparisons overflow for error rate {} and delta {}",
                                  req.error_rate, req.target_delta));
  }
  return std::max<Count>(1, static_cast<Count>(std::ceil(n)));
}

class ExactTarget {
 public:
  explicit ExactTarget(const PlanRequest& req) : req_(req) {}

  bool meets(Count n) const {
    if (n < 1) return false;
    const auto res = bioquake(ErrorObservation::from_rate(n, req_.error_rate, req_.alpha));
    return *res.delta_rel <= req_.target_delta;
  }

 private:
  PlanRequest req_;
};

Count make_conservative(const ExactTarget& target, Count n) {
  for (int round = 0; round < 256; ++round) {
    std::vector<Count> samples;
    if (3 * n + 1 <= 2048) {
      for (Count k = n; k <= 4 * n; ++k) samples.push_back(k);
    } else {
      constexpr int kSamples = 1024;
      for (int i = 0; i < kSamples; ++i) {
        const double f = std::pow(4.0, static_cast<double>(i) / (kSamples - 1));
        samples.push_back(std::min(4 * n, static_cast<Count>(std::llround(f * static_cast<double>(n)))));
      }
      samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    }
    Count last_miss = -1;
    for (const Count k : samples) {
      if (!target.meets(k)) last_miss = k;
    }
    if (last_miss < 0) return n;
    n = last_miss + 1;
    if (n > kMaxComparisons) throw DomainError("target delta infeasible below the search ceiling");
  }
  throw DomainError("conservative search did not settle");
}

// Superscript rendering of a (possibly negative) integer exponent.
std::string superscript(int value) {
  static constexpr const char* kDigits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  std::string out = value < 0 ? "⁻" : "";
  const std::string digits = std::to_string(std::abs(value));
  for (const char c : digits) out += kDigits[c - '0'];
  return out;
}

}  // namespace

void PlanRequest::validate() const {
  if (!(error_rate > 0.0 && error_rate < 1.0)) {
    throw DomainError(fmt::format("error rate must lie in (0, 1), got {}", error_rate));
  }
  if (!(target_delta > 0.0) || !std::isfinite(target_delta)) {
    throw DomainError(fmt::format("target delta must be positive, got {}", target_delta));
  }
  check_alpha(alpha);
}

Count required_comparisons_approx(const PlanRequest& req) {
  req.validate();
  if (req.mode != PlanMode::approx) throw DomainError("request is not in approx mode");
  return closed_form(req);
}

Count required_comparisons_exact(const PlanRequest& req) {
  req.validate();
  if (req.mode != PlanMode::exact) throw DomainError("request is not in exact mode");
  if (req.target_delta < bounds(kMaxComparisons).delta_rel_min) {
    throw DomainError(fmt::format("target delta {} is infeasible: below 1/(2N) at N = {}",
                                  req.target_delta, kMaxComparisons));
  }
  const ExactTarget target(req);

  Count start = kMaxComparisons;
  try {
    start = std::min(closed_form(req), kMaxComparisons);
  } catch (const DomainError&) {
  }

  // Bracket: meets(lo) is false (lo = 0 counts as false), meets(hi) is true.
  Count lo = 0;
  Count hi = 0;
  if (target.meets(start)) {
    hi = start;
    lo = start / 2;
    while (lo >= 1 && target.meets(lo)) {
      hi = lo;
      lo /= 2;
    }
  } else {
    lo = start;
    hi = std::min(2 * start, kMaxComparisons);
    while (!target.meets(hi)) {
      if (hi == kMaxComparisons) {
        throw DomainError(fmt::format("target delta {} not reachable within {} comparisons",
                                      req.target_delta, kMaxComparisons));
      }
      lo = hi;
      hi = std::min(2 * hi, kMaxComparisons);
    }
  }
  while (hi - lo > 1) {
    const Count mid = lo + (hi - lo) / 2;
    if (target.meets(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  Count best = hi;
  if (hi <= kExhaustiveLimit) {
    for (Count n = 1; n < hi; ++n) {
      if (target.meets(n)) {
        best = n;
        break;
      }
    }
  } else {
    for (Count n = hi - 1; n >= std::max<Count>(1, hi - kRefineWindow); --n) {
      if (target.meets(n)) best = n;
    }
  }
  return req.conservative ? make_conservative(target, best) : best;
}

Count required_comparisons(const PlanRequest& req) {
  return req.mode == PlanMode::exact ? required_comparisons_exact(req)
                                     : required_comparisons_approx(req);
}

double rule_constant(double delta, double alpha) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError(fmt::format("delta must be positive, got {}", delta));
  }
  const double z = special::two_sided_z(alpha);
  return z * z / (delta * delta);
}

double rule_numerator(double delta, double alpha) {
  if (std::fabs(delta - kSixPercentRule) < 1e-12 && std::fabs(alpha - 0.05) < 1e-12) {
    return 1e3;
  }
  return rule_constant(delta, alpha);
}

double min_reportable_error(Count comparisons, double delta, double alpha) {
  if (comparisons < 1) throw DomainError("comparison count must be at least 1");
  return std::min(1.0, rule_numerator(delta, alpha) / static_cast<double>(comparisons));
}

OneSigFig one_significant_figure(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(fmt::format("cannot render {} to one significant figure", value));
  }
  if (value >= 1.0) return {1, 0, true};

  // Shortest round-trip digits, e.g. 0.00025 -> "2.5e-04".
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
  const std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
  const auto e_pos = text.find('e');
  std::string digits;
  for (const char c : text.substr(0, e_pos)) {
    if (c != '.') digits += c;
  }
  int exponent = 0;
  std::from_chars(text.data() + e_pos + 1 + (text[e_pos + 1] == '+' ? 1 : 0),
                  text.data() + text.size(), exponent);

  int lead = digits[0] - '0';
  const std::string_view rest = std::string_view(digits).substr(1);
  bool round_up = false;
  if (!rest.empty()) {
    if (rest[0] > '5') {
      round_up = true;
    } else if (rest[0] == '5') {
      const bool exact_half = rest.find_first_not_of('0', 1) == std::string_view::npos;
      round_up = exact_half ? (lead % 2 == 1) : true;
    }
  }
  if (round_up) ++lead;
  if (lead == 10) {
    lead = 1;
    ++exponent;
  }
  if (exponent >= 0) return {1, 0, true};
  return {lead, exponent, false};
}

std::string format_min_error(double value) {
  const auto sf = one_significant_figure(value);
  if (sf.capped) return "≥1";
  return fmt::format("{}×10{}", sf.mantissa, superscript(sf.exponent));
}

std::string format_min_error_ascii(double value) {
  const auto sf = one_significant_figure(value);
  if (sf.capped) return ">=1";
  return fmt::format("{}e{}", sf.mantissa, sf.exponent);
}

void CurveSpec::validate() const {
  if (deltas.empty()) throw DomainError("curve needs at least one delta");
  for (const double d : deltas) {
    if (!(d > 0.0) || !std::isfinite(d)) throw DomainError(fmt::format("delta must be positive, got {}", d));
  }
  check_alpha(alpha);
  if (!(error_low > 0.0 && error_low < error_high && error_high <= 0.5)) {
    throw DomainError(fmt::format("error range must satisfy 0 < low < high <= 0.5, got {}:{}",
                                  error_low, error_high));
  }
  if (points < 2) throw DomainError(fmt::format("curve needs at least 2 points, got {}", points));
}

std::vector<CurveRow> curve(const CurveSpec& spec) {
  spec.validate();
  std::vector<double> deltas = spec.deltas;
  std::sort(deltas.begin(), deltas.end());

  std::vector<double> grid(static_cast<std::size_t>(spec.points));
  const double log_lo = std::log(spec.error_low);
  const double log_hi = std::log(spec.error_high);
  for (int i = 0; i < spec.points; ++i) {
    const double t = static_cast<double>(i) / (spec.points - 1);
    grid[static_cast<std::size_t>(i)] = std::exp(log_lo + t * (log_hi - log_lo));
  }
  grid.front() = spec.error_low;
  grid.back() = spec.error_high;

  std::vector<CurveRow> rows;
  rows.reserve(deltas.size() * grid.size());
  for (const double delta : deltas) {
    for (const double er : grid) {
      const PlanRequest req{er, delta, spec.alpha, spec.mode, false};
      rows.push_back({er, delta, 1.0 - spec.alpha, required_comparisons(req)});
    }
  }
  return rows;
}

std::string decimal_significant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return fmt::format("{}", value);
  // Round in scientific form first so a carry (9.999995 -> 10.0000) is seen.
  const std::string sci = fmt::format("{:.{}e}", value, digits - 1);
  const int exponent = std::stoi(sci.substr(sci.find('e') + 1));
  const int decimals = std::max(0, digits - 1 - exponent);
  return fmt::format("{:.{}f}", value, decimals);
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "error_rate,delta,confidence,required_comparisons\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", decimal_significant(r.error_rate),
                       decimal_significant(r.delta), decimal_significant(r.confidence),
                       r.required_comparisons);
  }
  return out;
}

}  // namespace bioquake

#include "bioquake/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bioquake/special.hpp"

namespace bioquake {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  }
}

void check_binomial_args(Count comparisons, Count errors, double rate) {
  if (comparisons < 0) throw DomainError("comparison count must be non-negative");
  if (errors < 0 || errors > comparisons) {
    throw DomainError(fmt::format("error count {} outside [0, {}]", errors, comparisons));
  }
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw DomainError(fmt::format("rate must lie in [0, 1], got {}", rate));
  }
}

// Smallest k in [lo, hi] with pred(k) true, for pred monotone false -> true
// and pred(hi) true. Gallops outward from `guess` before bisecting, so the
// number of evaluations is logarithmic in |answer - guess| rather than in N.
template <class Pred>
Count first_true(Count lo, Count hi, Count guess, Pred&& pred) {
  guess = std::clamp(guess, lo, hi);
  Count below = lo - 1;  // pred(below) treated as false
  Count above = hi;      // pred(above) true
  if (pred(guess)) {
    above = guess;
    Count step = 1;
    while (above > lo) {
      const Count probe = std::max(lo, above - step);
      if (!pred(probe)) {
        below = probe;
        break;
      }
      above = probe;
      step *= 2;
    }
    if (above == lo) return lo;
  } else {
    below = guess;
    Count step = 1;
    while (true) {
      const Count probe = std::min(hi, below + step);
      if (probe == hi || pred(probe)) {
        above = probe;
        break;
      }
      below = probe;
      step *= 2;
    }
  }
  while (above - below > 1) {
    const Count mid = below + (above - below) / 2;
    if (pred(mid)) {
      above = mid;
    } else {
      below = mid;
    }
  }
  return above;
}

struct ClassInfo {
  std::string_view label;
  std::string_view name;
  std::string_view color;
  std::string_view hex;
};

constexpr std::array<ClassInfo, 7> kClasses = {{
    {"A+", "Optimal", "green", "#9fdf9f"},
    {"A", "Excellent", "blue", "#99c2ff"},
    {"B", "Very Good", "periwinkle", "#c3c3f5"},
    {"C", "Good", "yellow", "#ffff80"},
    {"D", "Fair", "orange", "#ffc080"},
    {"E", "Poor", "brown", "#d9b38c"},
    {"F", "Unacceptable", "red", "#ff8080"},
}};

const ClassInfo& info(CertaintyClass c) { return kClasses[static_cast<std::size_t>(c)]; }

}  // namespace

ErrorObservation ErrorObservation::from_rate(Count comparisons, double rate, double alpha) {
  ErrorObservation obs{comparisons, std::nullopt, rate, alpha};
  obs.validate();
  return obs;
}

ErrorObservation ErrorObservation::from_counts(Count comparisons, Count errors, double alpha) {
  if (comparisons < 1) throw DomainError("comparison count must be at least 1");
  ErrorObservation obs{comparisons, errors,
                       static_cast<double>(errors) / static_cast<double>(comparisons), alpha};
  obs.validate();
  return obs;
}

ErrorObservation ErrorObservation::from_counts_and_rate(Count comparisons, Count errors,
                                                        double rate, double alpha) {
  ErrorObservation obs{comparisons, errors, rate, alpha};
  obs.validate();
  return obs;
}

void ErrorObservation::validate() const {
  if (comparisons < 1) {
    throw DomainError(fmt::format("comparison count must be at least 1, got {}", comparisons));
  }
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw DomainError(fmt::format("error rate must lie in [0, 1], got {}", rate));
  }
  check_alpha(alpha);
  if (errors) {
    if (*errors < 0 || *errors > comparisons) {
      throw DomainError(fmt::format("error count {} outside [0, {}]", *errors, comparisons));
    }
    const double n = static_cast<double>(comparisons);
    if (!(std::fabs(rate - static_cast<double>(*errors) / n) < 0.5 / n)) {
      throw DomainError(fmt::format("error rate {} inconsistent with {} errors in {} comparisons",
                                    rate, *errors, comparisons));
    }
  }
}

double binomial_log_pmf(Count comparisons, Count errors, double rate) {
  check_binomial_args(comparisons, errors, rate);
  return special::log_binomial_pmf_raw(static_cast<double>(errors),
                                       static_cast<double>(comparisons), rate, 1.0 - rate);
}

double binomial_cdf(Count comparisons, Count errors, double rate) {
  check_binomial_args(comparisons, errors, rate);
  if (errors >= comparisons || rate == 0.0) return 1.0;
  if (rate == 1.0) return 0.0;
  return special::regularized_beta(1.0 - rate, rate, static_cast<double>(comparisons - errors),
                                   static_cast<double>(errors) + 1.0);
}

double binomial_sf(Count comparisons, Count errors, double rate) {
  check_binomial_args(comparisons, errors, rate);
  if (errors >= comparisons || rate == 0.0) return 0.0;
  if (rate == 1.0) return 1.0;
  return special::regularized_beta(1.0 - rate, rate, static_cast<double>(comparisons - errors),
                                   static_cast<double>(errors) + 1.0, /*upper=*/true);
}

AcceptanceRegion acceptance_region(const ErrorObservation& obs) {
  obs.validate();
  const Count n = obs.comparisons;
  const double p = obs.rate;
  const double half_alpha = 0.5 * obs.alpha;

  const auto lower_tail = [&](Count k) {  // P(X < k)
    return k <= 0 ? 0.0 : binomial_cdf(n, std::min(k - 1, n), p);
  };
  const auto upper_tail = [&](Count k) { return binomial_sf(n, k, p); };  // P(X > k)

  const double mean = static_cast<double>(n) * p;
  const double spread = special::two_sided_z(obs.alpha) * std::sqrt(mean * (1.0 - p));
  const auto guess_low = static_cast<Count>(std::floor(mean - spread));
  const auto guess_high = static_cast<Count>(std::ceil(mean + spread));

  AcceptanceRegion region;
  region.n_low =
      first_true(0, n + 1, guess_low, [&](Count k) { return lower_tail(k) > half_alpha; }) - 1;
  region.n_high =
      first_true(0, n, guess_high, [&](Count k) { return upper_tail(k) <= half_alpha; });
  region.tail_low = lower_tail(region.n_low);
  region.tail_high = upper_tail(region.n_high);
  return region;
}

UncertaintyResult bioquake(const ErrorObservation& obs) {
  UncertaintyResult result;
  result.comparisons = obs.comparisons;
  result.rate = obs.rate;
  result.alpha = obs.alpha;
  result.region = acceptance_region(obs);
  const double n = static_cast<double>(obs.comparisons);
  result.delta_abs = static_cast<double>(result.region.n_high - result.region.n_low) / (2.0 * n);
  if (obs.rate > 0.0) result.delta_rel = result.delta_abs / obs.rate;
  result.interval_low = static_cast<double>(result.region.n_low) / n;
  result.interval_high = static_cast<double>(result.region.n_high) / n;
  result.certainty_class = classify(result.delta_rel);
  return result;
}

CertaintyClass classify(double delta_rel) {
  if (std::isnan(delta_rel) || delta_rel < 0.0) {
    throw DomainError(fmt::format("relative uncertainty must be non-negative, got {}", delta_rel));
  }
  if (delta_rel < 0.01) return CertaintyClass::APlus;
  if (delta_rel < 0.05) return CertaintyClass::A;
  if (delta_rel < 0.10) return CertaintyClass::B;
  if (delta_rel < 0.30) return CertaintyClass::C;
  if (delta_rel < 0.50) return CertaintyClass::D;
  if (delta_rel < 1.00) return CertaintyClass::E;
  return CertaintyClass::F;
}

CertaintyClass classify(std::optional<double> delta_rel) {
  return delta_rel ? classify(*delta_rel) : CertaintyClass::F;
}

UncertaintyBounds bounds(Count comparisons) {
  if (comparisons < 1) throw DomainError("bounds require at least one comparison");
  const double half_inv = 0.5 / static_cast<double>(comparisons);
  return {0.5, half_inv, half_inv};
}

std::string_view class_label(CertaintyClass c) { return info(c).label; }
std::string_view class_name(CertaintyClass c) { return info(c).name; }
std::string_view class_color(CertaintyClass c) { return info(c).color; }
std::string_view class_hex(CertaintyClass c) { return info(c).hex; }

std::optional<CertaintyClass> parse_class_label(std::string_view label) {
  for (std::size_t i = 0; i < kClasses.size(); ++i) {
    if (kClasses[i].label == label) return static_cast<CertaintyClass>(i);
  }
  return std::nullopt;
}

std::string class_display(CertaintyClass c) {
  return fmt::format("{} ({})", info(c).label, info(c).name);
}

}  // namespace bioquake

#pragma once

// Brute-force references, deliberately naive: term-by-term pmf summation in
// long double from lgammal, with upper tails summed directly.

#include <cmath>
#include <vector>

#include "bioquake/core.hpp"

namespace oracle {

using bioquake::Count;

inline std::vector<long double> pmf_table(Count n_total, double p) {
  std::vector<long double> pmf(static_cast<std::size_t>(n_total) + 1, 0.0L);
  if (p == 0.0) {
    pmf[0] = 1.0L;
    return pmf;
  }
  if (p == 1.0) {
    pmf.back() = 1.0L;
    return pmf;
  }
  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log1p(-static_cast<long double>(p));
  const long double ln_fact_n = std::lgamma(static_cast<long double>(n_total) + 1.0L);
  for (Count k = 0; k <= n_total; ++k) {
    const long double kk = static_cast<long double>(k);
    const long double log_term = ln_fact_n - std::lgamma(kk + 1.0L) -
                                 std::lgamma(static_cast<long double>(n_total - k) + 1.0L) + kk * lp +
                                 static_cast<long double>(n_total - k) * lq;
    pmf[static_cast<std::size_t>(k)] = std::exp(log_term);
  }
  return pmf;
}

inline long double cdf(Count n_total, Count n, double p) {
  const auto pmf = pmf_table(n_total, p);
  long double s = 0.0L;
  for (Count k = 0; k <= n; ++k) s += pmf[static_cast<std::size_t>(k)];
  return s;
}

struct Region {
  Count n_low = 0;
  Count n_high = 0;
};

/// Scans every cumulative sum. n_low: largest n with P(X <= n-1) <= a/2;
/// n_high: smallest n with P(X > n) <= a/2.
inline Region region(Count n_total, double p, double alpha) {
  const auto pmf = pmf_table(n_total, p);
  const long double half = static_cast<long double>(alpha) / 2.0L;
  const std::size_t size = pmf.size();
  std::vector<long double> lower(size + 1, 0.0L);  // lower[n] = P(X <= n-1)
  for (std::size_t k = 0; k < size; ++k) lower[k + 1] = lower[k] + pmf[k];
  std::vector<long double> upper(size, 0.0L);  // upper[n] = P(X > n)
  for (std::size_t k = size - 1; k-- > 0;) upper[k] = upper[k + 1] + pmf[k + 1];

  Region r;
  for (Count n = 0; n <= n_total; ++n) {
    if (lower[static_cast<std::size_t>(n)] <= half) r.n_low = n;
  }
  for (Count n = n_total; n >= 0; --n) {
    if (upper[static_cast<std::size_t>(n)] <= half) r.n_high = n;
  }
  return r;
}

/// Equal error rate of two normal score distributions, by bisection on
/// the crossing of FNMR(t) = Phi((t - mg)/sg) and FMR(t) = 1 - Phi((t - mi)/si).
inline double gaussian_eer(double mg, double sg, double mi, double si) {
  const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  double lo = mi;
  double hi = mg;
  for (int i = 0; i < 200; ++i) {
    const double t = (lo + hi) / 2.0;
    const double fnmr = phi((t - mg) / sg);
    const double fmr = 1.0 - phi((t - mi) / si);
    (fnmr < fmr ? lo : hi) = t;
  }
  return phi((lo - mg) / sg);
}

}  // namespace oracle

#pragma once

#include <cstdint>

namespace bioquake::special {

// Error of Stirling's approximation to ln(n!):
//   ln(n!) - [(n + 1/2) ln(n) - n + ln(sqrt(2 pi))]
double stirling_error(double n);

// Deviance term x ln(x / np) + np - x, evaluated without cancellation
// when x is close to np.
double binomial_deviance(double x, double np);

// ln of the binomial pmf at (possibly non-integer) x for n trials with success
// probability p and q = 1 - p supplied separately. Uses the saddle-point
// form, so it stays accurate for n far beyond the range where ln Gamma
// differences lose all digits.
double log_binomial_pmf_raw(double x, double n, double p, double q);

// Regularized incomplete beta I_x(a, b) with y = 1 - x passed explicitly so
// callers with a tiny y keep full precision. `upper` selects 1 - I_x(a, b).
double regularized_beta(double x, double y, double a, double b, bool upper = false);

double normal_cdf(double z);

// Inverse of the standard normal cdf. Acklam's rational approximation
// followed by one Halley step against erfc; |error| < 1e-14 on (0, 1).
double normal_quantile(double prob);

// z such that P(|Z| <= z) = 1 - alpha.
double two_sided_z(double alpha);

}  // namespace bioquake::special

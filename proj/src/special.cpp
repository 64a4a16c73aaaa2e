#include "bioquake/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bioquake::special {

namespace {

constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;
constexpr double kLn2Pi = 1.837877066409345483560659472811;

// stirling_error at n = 0, 0.5, 1, ..., 15.
constexpr std::array<double, 31> kStirlingHalves = {
    0.0,
    0.1534264097200273452913848,
    0.0810614667953272582196702,
    0.0548141210519176538961390,
    0.0413406959554092940938221,
    0.03316287351993628748511048,
    0.02767792568499833914878929,
    0.02374616365629749597132920,
    0.02079067210376509311152277,
    0.01848845053267318523077934,
    0.01664469118982119216319487,
    0.01513497322191737887351255,
    0.01387612882307074799874573,
    0.01281046524292022692424986,
    0.01189670994589177009505572,
    0.01110455975820691732662991,
    0.010411265261972096497478567,
    0.009799416126158803298389475,
    0.009255462182712732917728637,
    0.008768700134139385462952823,
    0.008330563433362871256469318,
    0.007934114564314020547248100,
    0.007573675487951840794972024,
    0.007244554301320383179543912,
    0.006942840107209529865664152,
    0.006665247032707682442354394,
    0.006408994188004207068439631,
    0.006171712263039457647532867,
    0.005951370112758847735624416,
    0.005746216513010115682023589,
    0.005554733551962801371038690,
};

constexpr double kS0 = 1.0 / 12.0;
constexpr double kS1 = 1.0 / 360.0;
constexpr double kS2 = 1.0 / 1260.0;
constexpr double kS3 = 1.0 / 1680.0;
constexpr double kS4 = 1.0 / 1188.0;

// Continued fraction for I_x(a, b) (modified Lentz). Converges quickly for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  // Iterations scale with sqrt(min(a, b)) near the mode.
  const auto max_iter = static_cast<long long>(1000.0 + 50.0 * std::sqrt(std::min(a, b)));
  for (long long m = 1; m <= max_iter; ++m) {
    const double md = static_cast<double>(m);
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// ln G(a + b) - ln G(b) without the cancellation of two large lgamma values.
double log_gamma_ratio(double a, double b) {
  if (b < 10.0) return std::lgamma(a + b) - std::lgamma(b);
  return stirling_error(a + b) - stirling_error(b) + (b - 0.5) * std::log1p(a / b) + a * std::log(a + b) - a;
}

// ln[x^a y^b / (a B(a, b))], written through the binomial saddle-point pmf:
// x^a y^b / B(a, b) = (a + b - 1) x y pmf(a - 1; a + b - 2, x).
double log_beta_prefactor(double x, double y, double a, double b) {
  if (a < 1.0 || b < 1.0) {
    // ln B(a, b) = ln G(small) - [ln G(small + large) - ln G(large)].
    const double small = std::min(a, b);
    const double large = std::max(a, b);
    return a * std::log(x) + b * std::log(y) + log_gamma_ratio(small, large) - std::lgamma(small) - std::log(a);
  }
  return std::log(a + b - 1.0) + std::log(x) + std::log(y) +
         log_binomial_pmf_raw(a - 1.0, a + b - 2.0, x, y) - std::log(a);
}

}  // namespace

double stirling_error(double n) {
  if (n <= 15.0) {
    const double twice = n + n;
    if (twice == std::floor(twice)) return kStirlingHalves[static_cast<std::size_t>(twice)];
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLnSqrt2Pi;
  }
  const double nn = n * n;
  if (n > 500.0) return (kS0 - kS1 / nn) / n;
  if (n > 80.0) return (kS0 - (kS1 - kS2 / nn) / nn) / n;
  if (n > 35.0) return (kS0 - (kS1 - (kS2 - kS3 / nn) / nn) / nn) / n;
  return (kS0 - (kS1 - (kS2 - (kS3 - kS4 / nn) / nn) / nn) / nn) / n;
}

double binomial_deviance(double x, double np) {
  if (!std::isfinite(x) || !std::isfinite(np) || np == 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    if (std::fabs(s) < std::numeric_limits<double>::min()) return s;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / static_cast<double>(2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

double log_binomial_pmf_raw(double x, double n, double p, double q) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (p == 0.0) return x == 0.0 ? 0.0 : kNegInf;
  if (q == 0.0) return x == n ? 0.0 : kNegInf;
  if (x == 0.0) {
    if (n == 0.0) return 0.0;
    return p < 0.1 ? -binomial_deviance(n, n * q) - n * p : n * std::log(q);
  }
  if (x == n) {
    return q < 0.1 ? -binomial_deviance(n, n * p) - n * q : n * std::log(p);
  }
  if (x < 0.0 || x > n) return kNegInf;
  const double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x) -
                    binomial_deviance(x, n * p) - binomial_deviance(n - x, n * q);
  const double lf = kLn2Pi + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

double regularized_beta(double x, double y, double a, double b, bool upper) {
  if (x <= 0.0) return upper ? 1.0 : 0.0;
  if (y <= 0.0) return upper ? 0.0 : 1.0;
  // Evaluate whichever side the continued fraction handles well, then
  // complement if the other tail was asked for.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = std::exp(log_beta_prefactor(x, y, a, b)) * beta_continued_fraction(x, a, b);
    return upper ? 1.0 - lower : lower;
  }
  const double upper_tail = std::exp(log_beta_prefactor(y, x, b, a)) * beta_continued_fraction(y, b, a);
  return upper ? upper_tail : 1.0 - upper_tail;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    if (prob == 0.0) return -std::numeric_limits<double>::infinity();
    if (prob == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("normal_quantile: probability outside [0, 1]");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  double x = 0.0;
  if (prob < kLow) {
    const double q = std::sqrt(-2.0 * std::log(prob));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (prob <= 1.0 - kLow) {
    const double q = prob - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-prob));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement.
  for (int i = 0; i < 2; ++i) {
    const double e = normal_cdf(x) - prob;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double two_sided_z(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
  // Upper quantile via the lower tail keeps precision for tiny alpha.
  return -normal_quantile(0.5 * alpha);
}

}  // namespace bioquake::special

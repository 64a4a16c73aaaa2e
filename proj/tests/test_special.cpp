#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "bioquake/special.hpp"
#include "oracle.hpp"

using namespace bioquake::special;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

double stirling_reference(double n) {
  const big x(n);
  const big v = boost::math::lgamma(x + 1) - (x + big(0.5)) * log(x) + x -
                log(sqrt(2 * boost::math::constants::pi<big>()));
  return static_cast<double>(v);
}

}  // namespace

TEST(StirlingError, MatchesHighPrecisionLogGamma) {
  for (const double n : {0.5, 1.0, 1.5, 2.0, 7.5, 15.0, 15.5, 16.0, 20.25, 100.0, 1e4, 1e8, 1e12}) {
    const double want = stirling_reference(n);
    EXPECT_NEAR(stirling_error(n), want, std::fabs(want) * 1e-13 + 1e-300) << "n=" << n;
  }
}

TEST(NormalQuantile, AgreesWithInverseErfc) {
  for (const double p : {1e-12, 1e-6, 0.001, 0.025, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999999}) {
    const double want = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
    EXPECT_NEAR(normal_quantile(p), want, 1e-10 * std::max(1.0, std::fabs(want))) << "p=" << p;
  }
}

TEST(NormalQuantile, TwoSidedZAtFivePercent) {
  EXPECT_NEAR(two_sided_z(0.05), 1.959963984540054, 1e-9);
  EXPECT_NEAR(two_sided_z(0.01), 2.5758293035489004, 1e-9);
}

TEST(NormalQuantile, RejectsOutOfRange) {
  EXPECT_EQ(normal_quantile(0.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(normal_quantile(1.0), std::numeric_limits<double>::infinity());
  EXPECT_ANY_THROW(normal_quantile(-0.1));
  EXPECT_ANY_THROW(normal_quantile(1.1));
  EXPECT_ANY_THROW(two_sided_z(0.0));
}

TEST(NormalCdf, InvertsQuantile) {
  for (double p = 0.001; p < 1.0; p += 0.0371) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-13);
}

TEST(RegularizedBeta, IntegerArgumentsMatchBinomialTail) {
  // I_x(a, b) = P(Y >= a), Y ~ Binomial(a + b - 1, x).
  for (const int a : {1, 2, 5, 30, 200}) {
    for (const int b : {1, 3, 17, 150}) {
      for (const double x : {0.001, 0.05, 0.3, 0.5, 0.8, 0.999}) {
        const auto pmf = oracle::pmf_table(a + b - 1, x);
        long double tail = 0.0L;
        for (std::size_t k = static_cast<std::size_t>(a); k < pmf.size(); ++k) tail += pmf[k];
        EXPECT_NEAR(regularized_beta(x, 1.0 - x, a, b), static_cast<double>(tail), 1e-12)
            << "a=" << a << " b=" << b << " x=" << x;
      }
    }
  }
}

TEST(RegularizedBeta, RealArgumentsMatchBoost) {
  for (const double a : {0.5, 2.5, 40.2, 1e4 + 0.3}) {
    for (const double b : {0.7, 9.9, 333.3, 5e5}) {
      for (const double x : {1e-6, 0.01, 0.4, 0.9}) {
        const double want = boost::math::ibeta(a, b, x);
        EXPECT_NEAR(regularized_beta(x, 1.0 - x, a, b), want, 1e-11) << a << " " << b << " " << x;
        EXPECT_NEAR(regularized_beta(x, 1.0 - x, a, b, true), 1.0 - want, 1e-11) << a << " " << b << " " << x;
      }
    }
  }
}

TEST(RegularizedBeta, Endpoints) {
  EXPECT_EQ(regularized_beta(0.0, 1.0, 3, 4), 0.0);
  EXPECT_EQ(regularized_beta(1.0, 0.0, 3, 4), 1.0);
}

TEST(BinomialDeviance, NonNegativeAndZeroAtMean) {
  EXPECT_NEAR(binomial_deviance(50.0, 50.0), 0.0, 1e-15);
  for (const double x : {1.0, 10.0, 49.0, 51.0, 1e6}) EXPECT_GE(binomial_deviance(x, 50.0), 0.0);
  // x log(x/np) + np - x, written out.
  EXPECT_NEAR(binomial_deviance(80.0, 50.0), 80.0 * std::log(80.0 / 50.0) + 50.0 - 80.0, 1e-12);
}

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bioquake/planner.hpp"
#include "bioquake/special.hpp"

using namespace bioquake;

namespace {

PlanRequest exact(double er, double delta, double alpha = 0.05) { return {er, delta, alpha, PlanMode::exact, false}; }
PlanRequest approx(double er, double delta, double alpha = 0.05) { return {er, delta, alpha, PlanMode::approx, false}; }

double delta_at(Count n, double er, double alpha = 0.05) {
  return *bioquake::bioquake(ErrorObservation::from_rate(n, er, alpha)).delta_rel;
}

Count brute_force_smallest(double er, double target, Count limit) {
  for (Count n = 1; n <= limit; ++n) {
    if (delta_at(n, er) <= target) return n;
  }
  return -1;
}

}  // namespace

TEST(RequiredComparisonsApprox, RulesOfThumb) {
  EXPECT_NEAR(static_cast<double>(required_comparisons_approx(approx(1e-3, 0.061))), 1e6, 0.04e6);
  EXPECT_NEAR(static_cast<double>(required_comparisons_approx(approx(1e-3, 0.10))), 3.7e5, 0.04 * 3.7e5);
  EXPECT_NEAR(static_cast<double>(required_comparisons_approx(approx(1e-3, 0.01))), 3.83e7, 0.01 * 3.83e7);
}

TEST(RequiredComparisonsApprox, ScalingLaw) {
  const double z = special::two_sided_z(0.05);
  for (const double delta : {0.01, 0.061, 0.1}) {
    for (double er = 1e-5; er < 0.5; er *= 3.7) {
      const auto rc = static_cast<double>(required_comparisons_approx(approx(er, delta)));
      EXPECT_LT(std::fabs(rc * er / (1.0 - er) - z * z / (delta * delta)), 1.0) << er << " " << delta;
    }
  }
}

TEST(RequiredComparisonsApprox, ModeMismatchAndValidation) {
  EXPECT_THROW(required_comparisons_approx(exact(0.01, 0.1)), DomainError);
  EXPECT_THROW(required_comparisons_exact(approx(0.01, 0.1)), DomainError);
  EXPECT_THROW(required_comparisons(approx(0.0, 0.1)), DomainError);
  EXPECT_THROW(required_comparisons(approx(1.0, 0.1)), DomainError);
  EXPECT_THROW(required_comparisons(approx(0.1, 0.0)), DomainError);
  EXPECT_THROW(required_comparisons(approx(0.1, 0.1, 1.0)), DomainError);
}

TEST(RequiredComparisonsExact, FairCoinMatchesBruteForce) {
  const Count got = required_comparisons_exact(exact(0.5, 0.20));
  EXPECT_LE(got, 100);
  EXPECT_EQ(got, brute_force_smallest(0.5, 0.20, 200));
}

TEST(RequiredComparisonsExact, SixPercentWorkedExample) {
  const auto got = static_cast<double>(required_comparisons_exact(exact(1e-3, 0.061)));
  EXPECT_NEAR(got, 1e6, 1e5);
}

TEST(RequiredComparisonsExact, NearCertainErrorNeedsFewComparisons) {
  const Count got = required_comparisons_exact(exact(0.999, 0.001));
  EXPECT_LE(got, 500);
  EXPECT_LE(delta_at(got, 0.999), 0.001);
  EXPECT_EQ(got, brute_force_smallest(0.999, 0.001, 500));
}

TEST(RequiredComparisonsExact, SmallestNOnABruteForceGrid) {
  for (const double er : {0.05, 0.2, 0.37, 0.5, 0.81}) {
    for (const double target : {0.08, 0.15, 0.3, 0.6}) {
      const Count want = brute_force_smallest(er, target, 20000);
      ASSERT_GT(want, 0);
      EXPECT_EQ(required_comparisons_exact(exact(er, target)), want) << er << " " << target;
    }
  }
}

TEST(RequiredComparisonsExact, ConsistencyProperty) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 60; ++i) {
    const double er = std::pow(10.0, std::uniform_real_distribution<double>(-4.0, -0.3)(gen));
    const double target = std::uniform_real_distribution<double>(0.02, 0.5)(gen);
    const Count n = required_comparisons_exact(exact(er, target));
    EXPECT_LE(delta_at(n, er), target) << er << " " << target;
  }
}

TEST(RequiredComparisonsExact, CloseToApproxOverTheRuleGrid) {
  for (const double delta : {0.01, 0.061, 0.1}) {
    for (const double er : {1e-4, 1e-3, 1e-2, 1e-1}) {
      const auto a = static_cast<double>(required_comparisons_approx(approx(er, delta)));
      const auto e = static_cast<double>(required_comparisons_exact(exact(er, delta)));
      EXPECT_LT(std::fabs(e - a) / a, 0.15) << er << " " << delta;
    }
  }
}

TEST(RequiredComparisonsExact, ConservativeHoldsOverTheSampledRange) {
  for (const double er : {0.05, 0.3}) {
    for (const double target : {0.1, 0.25}) {
      PlanRequest req = exact(er, target);
      const Count plain = required_comparisons_exact(req);
      req.conservative = true;
      const Count safe = required_comparisons_exact(req);
      EXPECT_GE(safe, plain);
      for (Count n = safe; n <= 4 * safe && n < safe + 3000; ++n) ASSERT_LE(delta_at(n, er), target) << n;
    }
  }
}

TEST(RequiredComparisonsExact, InfeasibleTarget) {
  EXPECT_THROW(required_comparisons_exact(exact(0.5, 1e-13)), DomainError);
}

TEST(RuleConstant, PublishedNumerators) {
  EXPECT_NEAR(rule_constant(0.01, 0.05), 38414.588, 0.01);
  EXPECT_NEAR(rule_constant(0.01, 0.05), 3.83e4, 0.01 * 3.83e4);
  EXPECT_NEAR(rule_constant(0.061, 0.05), 1032.4, 0.1);
  EXPECT_NEAR(rule_constant(0.061, 0.05), 1e3, 40.0);
  EXPECT_NEAR(rule_constant(0.1, 0.05), 384.15, 0.01);
  EXPECT_NEAR(rule_constant(0.1, 0.05), 3.7e2, 0.04 * 3.7e2);
  EXPECT_THROW(rule_constant(0.0, 0.05), DomainError);
}

TEST(MinReportableError, TableCells) {
  EXPECT_EQ(format_min_error(min_reportable_error(3000)), "3×10⁻¹");
  EXPECT_EQ(format_min_error(min_reportable_error(45000)), "2×10⁻²");
  EXPECT_EQ(format_min_error(min_reportable_error(1'000'000)), "1×10⁻³");
  EXPECT_EQ(format_min_error(min_reportable_error(23500)), "4×10⁻²");
  EXPECT_EQ(min_reportable_error(500), 1.0);
  EXPECT_EQ(format_min_error(min_reportable_error(500)), "≥1");
  EXPECT_EQ(format_min_error_ascii(min_reportable_error(3000)), "3e-1");
  EXPECT_EQ(format_min_error_ascii(1.0), ">=1");
}

TEST(MinReportableError, HalfEvenRounding) {
  EXPECT_EQ(format_min_error(2.5e-4), "2×10⁻⁴");
  EXPECT_EQ(format_min_error(3.5e-3), "4×10⁻³");
  EXPECT_EQ(format_min_error(2.51e-4), "3×10⁻⁴");
  EXPECT_EQ(format_min_error(9.7e-2), "1×10⁻¹");
  EXPECT_EQ(format_min_error(0.96), "≥1");
}

TEST(MinReportableError, MonotoneAndCapped) {
  double prev = 1.0;
  for (Count nc = 1; nc < 10'000'000; nc = nc * 11 / 10 + 1) {
    const double v = min_reportable_error(nc);
    EXPECT_LE(v, prev);
    EXPECT_LE(v, 1.0);
    if (nc <= 1000) {
      EXPECT_EQ(v, 1.0);
    }
    prev = v;
  }
  // General (delta, alpha): the cap holds up to the rule constant.
  const double rc = rule_constant(0.1, 0.05);
  for (Count nc = 1; nc <= static_cast<Count>(rc); ++nc) EXPECT_EQ(min_reportable_error(nc, 0.1, 0.05), 1.0);
  EXPECT_LT(min_reportable_error(static_cast<Count>(rc) + 1, 0.1, 0.05), 1.0);
  EXPECT_THROW(min_reportable_error(0), DomainError);
}

TEST(Curve, OrderingAndValues) {
  CurveSpec spec;
  spec.deltas = {0.1, 0.061};
  spec.error_low = 1e-4;
  spec.error_high = 1e-2;
  spec.points = 3;  // 1e-4, 1e-3, 1e-2
  const auto rows = curve(spec);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].delta, 0.061);
  EXPECT_EQ(rows[3].delta, 0.1);
  EXPECT_NEAR(rows[1].error_rate, 1e-3, 1e-15);
  EXPECT_NEAR(static_cast<double>(rows[1].required_comparisons), 1e6, 0.04e6);
  const auto n10 = static_cast<double>(rows[4].required_comparisons);
  EXPECT_GE(n10, 3.7e5);
  EXPECT_LE(n10, 3.9e5);
  EXPECT_DOUBLE_EQ(rows[0].confidence, 0.95);
}

TEST(Curve, HalvingTheErrorRateDoublesN) {
  CurveSpec spec;
  spec.deltas = {0.061};
  spec.error_low = 0.01 / 1024;
  spec.error_high = 0.01;
  spec.points = 11;  // successive points differ by a factor 2
  const auto rows = curve(spec);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double ratio = static_cast<double>(rows[i].required_comparisons) /
                         static_cast<double>(rows[i + 1].required_comparisons);
    EXPECT_NEAR(ratio, 2.0, 0.1);
  }
}

TEST(Curve, Validation) {
  CurveSpec spec;
  spec.deltas = {0.1};
  spec.error_low = 0.2;
  spec.error_high = 0.1;
  EXPECT_THROW(curve(spec), DomainError);
  spec.error_low = 0.01;
  spec.error_high = 0.6;
  EXPECT_THROW(curve(spec), DomainError);
  spec.error_high = 0.5;
  spec.points = 1;
  EXPECT_THROW(curve(spec), DomainError);
  spec.points = 2;
  spec.deltas = {};
  EXPECT_THROW(curve(spec), DomainError);
}

TEST(Curve, CsvFormat) {
  const std::vector<CurveRow> rows{{0.001, 0.061, 0.95, 1031341}, {1.0 / 3.0, 0.1, 0.95, 12}};
  EXPECT_EQ(curve_csv(rows),
            "error_rate,delta,confidence,required_comparisons\n"
            "0.00100000,0.0610000,0.950000,1031341\n"
            "0.333333,0.100000,0.950000,12\n");
}

TEST(DecimalSignificant, CarriesIntoNextDecade) {
  EXPECT_EQ(decimal_significant(9.9999996, 6), "10.0000");
  EXPECT_EQ(decimal_significant(0.000123456789, 6), "0.000123457");
}

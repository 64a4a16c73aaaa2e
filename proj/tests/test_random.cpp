#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "bioquake/random.hpp"
#include "oracle.hpp"

using namespace bioquake;

TEST(SplitMix64, ReferenceOutput) {
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64(state), 0x6E789E6AA1B965F4ULL);
}

TEST(Rng, XoshiroReferenceOutput) {
  // State {1, 2, 3, 4}: outputs from the published reference implementation.
  auto rng = Rng::from_state({1, 2, 3, 4});
  EXPECT_EQ(rng.next(), 11520u);
  EXPECT_EQ(rng.next(), 0u);
  EXPECT_EQ(rng.next(), 1509978240u);
  EXPECT_EQ(rng.next(), 1215971899390074240u);
}

TEST(Rng, DeterministicAndStreamsDiffer) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t k = 0; k < 1000; ++k) firsts.insert(Rng::stream(42, k).next());
  EXPECT_EQ(firsts.size(), 1000u);
  EXPECT_NE(Rng::stream(1, 0).next(), Rng::stream(2, 0).next());
  EXPECT_EQ(Rng::stream(9, 5).next(), Rng::stream(9, 5).next());
}

TEST(Rng, UniformMoments) {
  Rng rng(1);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(Rng, BoundedIsUniform) {
  Rng rng(2);
  std::vector<int> hist(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.bounded(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
  }
  double chi2 = 0.0;
  for (const int h : hist) chi2 += (h - n / 7.0) * (h - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.5);  // 6 dof, p ~ 0.001
  EXPECT_THROW(rng.bounded(0), DomainError);
}

TEST(Rng, NormalMoments) {
  Rng rng(3);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal(2.0, 0.5);
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 2.0, 0.005);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 0.5, 0.005);
}

TEST(Rng, BinomialMatchesPmf) {
  struct Case {
    Count n;
    double p;
  };
  for (const auto& c : {Case{10, 0.3}, Case{40, 0.02}, Case{25, 0.97}, Case{200, 0.5}}) {
    Rng rng(4);
    const int draws = 200000;
    std::vector<double> freq(static_cast<std::size_t>(c.n) + 1, 0.0);
    for (int i = 0; i < draws; ++i) {
      const Count k = rng.binomial(c.n, c.p);
      ASSERT_GE(k, 0);
      ASSERT_LE(k, c.n);
      freq[static_cast<std::size_t>(k)] += 1.0 / draws;
    }
    const auto pmf = oracle::pmf_table(c.n, c.p);
    double tv = 0.0;
    for (std::size_t k = 0; k < freq.size(); ++k) tv += std::fabs(freq[k] - static_cast<double>(pmf[k]));
    EXPECT_LT(tv / 2.0, 0.01) << c.n << " " << c.p;
  }
}

TEST(Rng, BinomialMomentsAtLargeN) {
  Rng rng(5);
  const Count n = 100000;
  const double p = 0.1;
  double sum = 0.0;
  double sq = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const auto k = static_cast<double>(rng.binomial(n, p));
    sum += k;
    sq += k * k;
  }
  const double mean = sum / draws;
  EXPECT_NEAR(mean, 10000.0, 5.0);
  EXPECT_NEAR(sq / draws - mean * mean, 9000.0, 400.0);
  EXPECT_EQ(rng.binomial(10, 0.0), 0);
  EXPECT_EQ(rng.binomial(10, 1.0), 10);
  EXPECT_THROW(rng.binomial(10, 1.5), DomainError);
}

TEST(SampleWithoutReplacement, DistinctAndRestoresScratch) {
  std::vector<std::uint32_t> scratch(1000);
  std::iota(scratch.begin(), scratch.end(), 0u);
  const auto identity = scratch;
  Rng rng(6);
  std::vector<std::uint32_t> out;
  for (int rep = 0; rep < 20; ++rep) {
    sample_without_replacement(scratch, 137, rng, out);
    EXPECT_EQ(std::set<std::uint32_t>(out.begin(), out.end()).size(), 137u);
    EXPECT_EQ(scratch, identity);
  }
  EXPECT_THROW(sample_without_replacement(scratch, 1001, rng, out), DomainError);
}

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "psyling/stats.hpp"
#include "synthetic.hpp"

using namespace psyling;
using namespace psyling::stats;

namespace {

const std::vector<double> kA = {2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 4.9};
const std::vector<double> kB = {3.9, 4.1, 6.2, 5.5, 7.0, 4.8, 5.1};

// Ten folds under three conditions.
const std::vector<std::vector<double>> kFolds = {
    {0.81, 0.85, 0.79, 0.90, 0.88, 0.84, 0.86, 0.80, 0.83, 0.87},
    {0.78, 0.80, 0.81, 0.85, 0.84, 0.80, 0.82, 0.77, 0.80, 0.83},
    {0.80, 0.83, 0.78, 0.86, 0.87, 0.81, 0.85, 0.79, 0.82, 0.84}};

std::vector<double> sample(std::size_t n, double mu, double sd, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = mu + sd * rng.normal();
  return out;
}

}  // namespace

TEST(Cdf, SymmetryPoints) {
  for (double df : {1.0, 2.5, 9.0, 1099.0}) EXPECT_EQ(t_cdf(0.0, df), 0.5);
  for (double d : {1.0, 4.0, 18.0, 734.0}) EXPECT_NEAR(f_cdf(1.0, d, d), 0.5, 1e-14);
  EXPECT_THROW(t_cdf(1.0, 0.0), InvalidInput);
  EXPECT_THROW(f_cdf(1.0, 2.0, -1.0), InvalidInput);
  EXPECT_THROW(f_cdf(-1.0, 2.0, 3.0), InvalidInput);
}

TEST(Cdf, QuadratureOracleT) {
  for (double df : {1.0, 2.0, 5.0, 9.0, 30.0, 734.0, 1084.9})
    for (double x : {-10.0, -3.0, -1.0, -0.5, 0.3, 1.0, 2.5, 5.0, 10.0})
      EXPECT_NEAR(t_cdf(x, df), oracle::t_cdf_quadrature(x, df), 1e-8) << x << " " << df;
}

TEST(Cdf, QuadratureOracleF) {
  for (double d1 : {1.0, 2.0, 5.0, 10.0, 365.0})
    for (double d2 : {3.0, 18.0, 734.0})
      for (double x : {0.1, 0.47, 1.0, 2.0, 4.0})
        EXPECT_NEAR(f_cdf(x, d1, d2), oracle::f_cdf_quadrature(x, d1, d2), 1e-8) << x << " " << d1 << " " << d2;
}

TEST(Cdf, ReferenceValues) {
  EXPECT_NEAR(t_cdf(1.5, 3), 0.8847080673775886, 1e-12);
  EXPECT_NEAR(t_cdf(-2.2, 9), 0.0276702863993058, 1e-12);
  EXPECT_NEAR(f_cdf(2.0, 1, 1099), 0.8424175684634699, 1e-12);
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517795, 1e-12);
}

TEST(Cdf, MonotoneWithLimits) {
  double last = 0;
  for (double x = -40; x <= 40; x += 0.25) {
    const double c = t_cdf(x, 3.0);
    EXPECT_GE(c, last);
    last = c;
  }
  EXPECT_LT(t_cdf(-1e6, 3.0), 1e-12);
  EXPECT_GT(t_cdf(1e6, 3.0), 1 - 1e-12);
  last = 0;
  for (double x = 0; x <= 50; x += 0.25) {
    const double c = f_cdf(x, 4.0, 12.0);
    EXPECT_GE(c, last);
    last = c;
  }
  EXPECT_EQ(f_cdf(0.0, 4.0, 12.0), 0.0);
  EXPECT_GT(f_cdf(1e6, 4.0, 12.0), 1 - 1e-12);
}

TEST(Welch, Fixture) {
  const auto r = welch_t(kA, kB);
  EXPECT_NEAR(r.statistic, -2.6732752158332844, 1e-12);
  EXPECT_NEAR(r.p, 0.019156843193022566, 1e-10);
  EXPECT_NEAR(r.df1, oracle::satterthwaite(sample_variance(kA), kA.size(), sample_variance(kB), kB.size()), 1e-12);
  EXPECT_NEAR(r.df1, 12.988234167397689, 1e-10);
}

TEST(Welch, IdenticalSwapShift) {
  const auto same = welch_t(kA, kA);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p, 1.0);
  const auto ab = welch_t(kA, kB), ba = welch_t(kB, kA);
  EXPECT_DOUBLE_EQ(ab.statistic, -ba.statistic);
  EXPECT_DOUBLE_EQ(ab.p, ba.p);
  std::vector<double> a2 = kA, b2 = kB;
  for (auto& v : a2) v += 100.0;
  for (auto& v : b2) v += 100.0;
  EXPECT_NEAR(welch_t(a2, b2).p, ab.p, 1e-9);
}

TEST(Welch, OneConstantGroupAndDegenerate) {
  const std::vector<double> flat(6, 2.0);
  const auto r = welch_t(kA, flat);
  EXPECT_NEAR(r.df1, kA.size() - 1.0, 1e-12);
  EXPECT_THROW(welch_t(flat, flat), DegenerateError);
  EXPECT_THROW(welch_t(std::vector<double>{1.0}, kB), InvalidInput);
}

TEST(Student, Fixture) {
  const auto r = student_t(kA, kB);
  EXPECT_NEAR(r.statistic, -2.6404237964226005, 1e-12);
  EXPECT_NEAR(r.p, 0.020379562905717956, 1e-10);
  EXPECT_EQ(r.df1, 13.0);
}

TEST(Paired, HandArithmetic) {
  const std::vector<double> a = {2, 3, 4, 6}, b = {1, 2, 3, 4};
  const auto r = paired_t(a, b);
  EXPECT_NEAR(r.statistic, 1.25 / (0.5 / 2.0), 1e-12);
  EXPECT_EQ(r.df1, 3.0);
  EXPECT_NEAR(r.p, 0.015392438073302296, 1e-10);
  EXPECT_EQ(paired_t(kFolds[0], kFolds[1]).df1, 9.0);
}

TEST(Paired, ZeroVarianceIsDegenerate) {
  EXPECT_THROW(paired_t(kFolds[0], kFolds[0]), DegenerateError);
  const std::vector<double> base = {1, 2, 3, 4, 5}, shifted = {3, 4, 5, 6, 7};
  EXPECT_THROW(paired_t(shifted, base), DegenerateError);
  EXPECT_THROW(paired_t(kA, kB), InvalidInput);
}

TEST(VarianceRatio, FixtureAndDf) {
  const auto r = variance_ratio_f(kA, kB);
  EXPECT_NEAR(r.statistic, 1.416537867078825, 1e-12);
  EXPECT_NEAR(r.p, 0.6873170217859257, 1e-10);
  const auto big = variance_ratio_f(sample(366, 0, 1, 1), sample(735, 0, 1, 2));
  EXPECT_EQ(big.df1, 365.0);
  EXPECT_EQ(*big.df2, 734.0);
  EXPECT_NEAR(big.statistic, 1.0, 0.2);
  const std::vector<double> flat(5, 1.0);
  EXPECT_THROW(variance_ratio_f(kA, flat), DegenerateError);
}

TEST(VarianceRatio, ScaleInvariant) {
  std::vector<double> a = kA, b = kB;
  for (auto& v : a) v *= -3.5;
  for (auto& v : b) v *= -3.5;
  EXPECT_NEAR(variance_ratio_f(a, b).p, variance_ratio_f(kA, kB).p, 1e-12);
}

TEST(Levene, SpreadsheetOracleAndReference) {
  const auto r = levene_f(kA, kB);
  const auto ss = oracle::levene_ss({kA, kB}, false);
  EXPECT_NEAR(r.statistic, ss.f, 1e-12);
  EXPECT_NEAR(r.statistic, 0.36470861812206035, 1e-12);
  EXPECT_NEAR(r.p, 0.55629502059106, 1e-10);
  EXPECT_EQ(r.df1, 1.0);
  EXPECT_EQ(*r.df2, 13.0);
  const auto med = levene_f(kA, kB, LeveneCenter::median);
  EXPECT_NEAR(med.statistic, oracle::levene_ss({kA, kB}, true).f, 1e-12);
  EXPECT_NEAR(med.statistic, 0.24132319880098463, 1e-12);
  const std::vector<std::vector<double>> three = {{1.2, 2.4, 3.1, 1.8}, {2.0, 2.2, 2.9, 3.5, 4.1}, {0.5, 3.3, 1.1}};
  EXPECT_NEAR(levene_f(three).statistic, 1.171140800982123, 1e-12);
  EXPECT_NEAR(levene_f(three).statistic, oracle::levene_ss(three, false).f, 1e-12);
}

TEST(Levene, ShapeDfAndShift) {
  const std::vector<double> a = {1, 2, 3, 7}, b = {11, 12, 13, 17};
  EXPECT_NEAR(levene_f(a, b).statistic, 0.0, 1e-14);
  const auto big = levene_f(sample(366, 0, 1, 3), sample(735, 0, 2, 4));
  EXPECT_EQ(*big.df2, 1099.0);
  std::vector<double> moved = kA;
  for (auto& v : moved) v -= 42.0;
  EXPECT_NEAR(levene_f(moved, kB).statistic, levene_f(kA, kB).statistic, 1e-9);
}

TEST(RmAnova, DecompositionOracle) {
  const auto r = rm_anova(kFolds);
  const auto ss = oracle::rm_anova_ss(kFolds);
  EXPECT_NEAR(r.statistic, ss.f, 1e-9);
  EXPECT_NEAR(r.statistic, 19.346456692913392, 1e-9);
  EXPECT_NEAR(r.p, 3.278638743823771e-05, 1e-12);
  EXPECT_EQ(r.df1, 2.0);
  EXPECT_EQ(*r.df2, 18.0);
}

TEST(RmAnova, IdenticalAndMismatch) {
  EXPECT_EQ(rm_anova({kFolds[0], kFolds[0], kFolds[0]}).statistic, 0.0);
  EXPECT_THROW(rm_anova({kA, kB}), InvalidInput);
}

TEST(TestResults, PRecomputedExactly) {
  const std::vector<TestResult> all = {welch_t(kA, kB),      student_t(kA, kB),         paired_t(kFolds[0], kFolds[1]),
                                       variance_ratio_f(kA, kB), levene_f(kA, kB), rm_anova(kFolds)};
  for (const auto& r : all) {
    EXPECT_EQ(recompute_p(r), r.p) << r.test;
    EXPECT_GE(r.p, 0.0);
    EXPECT_LE(r.p, 1.0);
  }
}

TEST(Stars, Thresholds) {
  EXPECT_EQ(stars(0.009), "**");
  EXPECT_EQ(stars(0.04), "*");
  EXPECT_EQ(stars(0.05), "");
}

TEST(Descriptive, Basics) {
  const std::vector<double> xs = {4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(mean(xs), 2.5);
  EXPECT_DOUBLE_EQ(median(xs), 2.5);
  EXPECT_NEAR(sample_variance(xs), 5.0 / 3.0, 1e-15);
  EXPECT_THROW(sample_variance(std::vector<double>{1.0}), InvalidInput);
}

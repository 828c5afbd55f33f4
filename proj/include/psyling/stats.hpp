#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psyling::stats {

double mean(std::span<const double> xs);
/// Sample variance (n-1). Requires n >= 2.
double sample_variance(std::span<const double> xs);
double sample_sd(std::span<const double> xs);
double median(std::span<const double> xs);

/// How the p-value was derived from the statistic.
enum class Tail {
  two_sided_t,  // 2 * P(T > |t|)
  two_sided_f,  // 2 * min(P(F <= f), P(F >= f))
  upper_f       // P(F >= f), the usual ANOVA tail
};

struct TestResult {
  std::string test;
  double statistic = 0.0;
  double df1 = 0.0;
  std::optional<double> df2;
  double p = 1.0;
  Tail tail = Tail::two_sided_t;
};

/// p recomputed from (statistic, df, tail). Equal to TestResult::p by construction.
double recompute_p(const TestResult& result);

/// "**" for p < 0.01, "*" for p < 0.05, else "".
std::string stars(double p);

double t_cdf(double x, double df);
double f_cdf(double x, double df1, double df2);
/// Standard normal CDF.
double normal_cdf(double z);

/// Welch's unequal-variance t test of mean(a) - mean(b), Satterthwaite df.
/// One group may have zero variance (the df then collapses to n-1 of the
/// other group); both zero is degenerate.
TestResult welch_t(std::span<const double> a, std::span<const double> b);
/// Pooled-variance Student t test, df = na + nb - 2.
TestResult student_t(std::span<const double> a, std::span<const double> b);
/// t on the paired differences a[i] - b[i], df = n - 1.
TestResult paired_t(std::span<const double> a, std::span<const double> b);
/// F = var(a) / var(b), df = (na - 1, nb - 1), two-sided.
TestResult variance_ratio_f(std::span<const double> a, std::span<const double> b);

enum class LeveneCenter { mean, median };

/// One-way ANOVA on absolute deviations from each group's center.
TestResult levene_f(std::span<const double> a, std::span<const double> b, LeveneCenter center = LeveneCenter::mean);
/// General k-group form.
TestResult levene_f(const std::vector<std::vector<double>>& groups, LeveneCenter center = LeveneCenter::mean);

/// One-way within-subjects ANOVA; groups[condition][subject].
/// No sphericity correction.
TestResult rm_anova(const std::vector<std::vector<double>>& groups);

}  // namespace psyling::stats

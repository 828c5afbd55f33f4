#include "psyling/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "psyling/common.hpp"

namespace psyling::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw InvalidInput("mean of an empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw InvalidInput("sample variance needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double sample_sd(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

double median(std::span<const double> xs) {
  if (xs.empty()) throw InvalidInput("median of an empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

std::string stars(double p) {
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

namespace {

void check_df(double df, const char* what) {
  if (!(df > 0.0) || std::isnan(df)) throw InvalidInput(std::string(what) + ": degrees of freedom must be > 0");
}

// P(|T| >= |t|).
double t_two_sided(double t, double df) {
  check_df(df, "t distribution");
  if (std::isinf(t)) return 0.0;
  return boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
}

double f_upper(double f, double df1, double df2) {
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return boost::math::ibetac(df1 / 2.0, df2 / 2.0, df1 * f / (df1 * f + df2));
}

double p_value(double statistic, double df1, std::optional<double> df2, Tail tail) {
  switch (tail) {
    case Tail::two_sided_t:
      return t_two_sided(statistic, df1);
    case Tail::two_sided_f: {
      const double lower = f_cdf(statistic, df1, *df2);
      const double upper = f_upper(statistic, df1, *df2);
      return std::min(1.0, 2.0 * std::min(lower, upper));
    }
    case Tail::upper_f:
      check_df(df1, "F distribution");
      check_df(*df2, "F distribution");
      return f_upper(statistic, df1, *df2);
  }
  return 1.0;
}

TestResult make_result(std::string name, double statistic, double df1, std::optional<double> df2, Tail tail) {
  TestResult r;
  r.test = std::move(name);
  r.statistic = statistic;
  r.df1 = df1;
  r.df2 = df2;
  r.tail = tail;
  r.p = p_value(statistic, df1, df2, tail);
  return r;
}

void require_size(std::span<const double> xs, std::size_t n, const char* test) {
  if (xs.size() < n) {
    throw InvalidInput(std::string(test) + ": each sample needs at least " + std::to_string(n) + " values");
  }
}

}  // namespace

double recompute_p(const TestResult& result) { return p_value(result.statistic, result.df1, result.df2, result.tail); }

double t_cdf(double x, double df) {
  check_df(df, "t_cdf");
  if (std::isnan(x)) throw InvalidInput("t_cdf: x is NaN");
  if (x == 0.0) return 0.5;
  const double tail = 0.5 * t_two_sided(x, df);
  return x > 0.0 ? 1.0 - tail : tail;
}

double f_cdf(double x, double df1, double df2) {
  check_df(df1, "f_cdf");
  check_df(df2, "f_cdf");
  if (std::isnan(x) || x < 0.0) throw InvalidInput("f_cdf: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::ibeta(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

TestResult welch_t(std::span<const double> a, std::span<const double> b) {
  require_size(a, 2, "welch_t");
  require_size(b, 2, "welch_t");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double qa = sample_variance(a) / na;
  const double qb = sample_variance(b) / nb;
  const double se2 = qa + qb;
  if (!(se2 > 0.0)) throw DegenerateError("welch_t: both samples have zero variance");
  const double t = (mean(a) - mean(b)) / std::sqrt(se2);
  const double df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  return make_result("welch_t", t, df, std::nullopt, Tail::two_sided_t);
}

TestResult student_t(std::span<const double> a, std::span<const double> b) {
  require_size(a, 2, "student_t");
  require_size(b, 2, "student_t");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double df = na + nb - 2.0;
  const double pooled = ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / df;
  if (!(pooled > 0.0)) throw DegenerateError("student_t: pooled variance is zero");
  const double t = (mean(a) - mean(b)) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  return make_result("student_t", t, df, std::nullopt, Tail::two_sided_t);
}

TestResult paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("paired_t: samples differ in length");
  require_size(a, 2, "paired_t");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double var = sample_variance(diff);
  if (!(var > 0.0)) {
    throw DegenerateError("paired_t: differences have zero variance (mean difference " + format_double(mean(diff)) + ")");
  }
  const double n = static_cast<double>(diff.size());
  const double t = mean(diff) / std::sqrt(var / n);
  return make_result("paired_t", t, n - 1.0, std::nullopt, Tail::two_sided_t);
}

TestResult variance_ratio_f(std::span<const double> a, std::span<const double> b) {
  require_size(a, 2, "variance_ratio_f");
  require_size(b, 2, "variance_ratio_f");
  const double vb = sample_variance(b);
  if (!(vb > 0.0)) throw DegenerateError("variance_ratio_f: denominator sample has zero variance");
  const double f = sample_variance(a) / vb;
  return make_result("variance_ratio_f", f, static_cast<double>(a.size() - 1), static_cast<double>(b.size() - 1),
                     Tail::two_sided_f);
}

TestResult levene_f(std::span<const double> a, std::span<const double> b, LeveneCenter center) {
  return levene_f(std::vector<std::vector<double>>{{a.begin(), a.end()}, {b.begin(), b.end()}}, center);
}

TestResult levene_f(const std::vector<std::vector<double>>& groups, LeveneCenter center) {
  if (groups.size() < 2) throw InvalidInput("levene_f: needs at least two groups");
  std::vector<std::vector<double>> dev;
  std::size_t total = 0;
  for (const auto& g : groups) {
    require_size(g, 2, "levene_f");
    const double c = center == LeveneCenter::mean ? mean(g) : median(g);
    std::vector<double> z;
    z.reserve(g.size());
    for (double x : g) z.push_back(std::abs(x - c));
    total += g.size();
    dev.push_back(std::move(z));
  }
  double grand = 0.0;
  for (const auto& z : dev) {
    for (double v : z) grand += v;
  }
  grand /= static_cast<double>(total);
  double between = 0.0, within = 0.0;
  for (const auto& z : dev) {
    const double m = mean(z);
    between += static_cast<double>(z.size()) * (m - grand) * (m - grand);
    for (double v : z) within += (v - m) * (v - m);
  }
  if (!(within > 0.0)) throw DegenerateError("levene_f: absolute deviations are constant within every group");
  const double k = static_cast<double>(dev.size());
  const double n = static_cast<double>(total);
  const double f = (between / (k - 1.0)) / (within / (n - k));
  const std::string name = center == LeveneCenter::mean ? "levene_f" : "brown_forsythe_f";
  return make_result(name, f, k - 1.0, n - k, Tail::upper_f);
}

TestResult rm_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw InvalidInput("rm_anova: needs at least two conditions");
  const std::size_t n = groups.front().size();
  if (n < 2) throw InvalidInput("rm_anova: needs at least two subjects");
  for (const auto& g : groups) {
    if (g.size() != n) throw InvalidInput("rm_anova: conditions differ in length");
  }
  const std::size_t k = groups.size();
  double grand = 0.0;
  for (const auto& g : groups) {
    for (double v : g) grand += v;
  }
  grand /= static_cast<double>(k * n);

  double ss_total = 0.0, ss_cond = 0.0, ss_subj = 0.0;
  for (const auto& g : groups) {
    const double m = mean(g);
    ss_cond += static_cast<double>(n) * (m - grand) * (m - grand);
    for (double v : g) ss_total += (v - grand) * (v - grand);
  }
  for (std::size_t s = 0; s < n; ++s) {
    double m = 0.0;
    for (const auto& g : groups) m += g[s];
    m /= static_cast<double>(k);
    ss_subj += static_cast<double>(k) * (m - grand) * (m - grand);
  }
  const double ss_error = std::max(0.0, ss_total - ss_cond - ss_subj);
  const double df1 = static_cast<double>(k - 1);
  const double df2 = static_cast<double>((k - 1) * (n - 1));
  // Tolerance relative to the data scale: the subtraction above leaves
  // rounding noise when conditions are exact copies.
  const double eps = 1e-12 * std::max(1.0, ss_total);
  if (ss_cond <= eps) return make_result("rm_anova", 0.0, df1, df2, Tail::upper_f);
  if (ss_error <= eps) throw DegenerateError("rm_anova: residual sum of squares is zero");
  const double f = (ss_cond / df1) / (ss_error / df2);
  return make_result("rm_anova", f, df1, df2, Tail::upper_f);
}

}  // namespace psyling::stats

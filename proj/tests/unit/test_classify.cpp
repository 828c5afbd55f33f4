#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "psyling/classify.hpp"
#include "psyling/stats.hpp"
#include "synthetic.hpp"

using namespace psyling;
using testsupport::make_matrix;
using testsupport::random_normal;

namespace {

Eigen::VectorXd random_labels(std::size_t n, Rng& rng) {
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) y(i) = rng.below(2) ? 1.0 : -1.0;
  y(0) = 1.0;
  y(n - 1) = -1.0;
  return y;
}

std::vector<int> labels_of(const std::vector<std::size_t>& counts_human_llm) {
  std::vector<int> y;
  y.insert(y.end(), counts_human_llm[0], 1);
  y.insert(y.end(), counts_human_llm[1], -1);
  return y;
}

}  // namespace

TEST(Ridge, HandSolvedToy) {
  Eigen::MatrixXd x(2, 1);
  x << -1, 1;
  Eigen::VectorXd y(2);
  y << -1, 1;
  const auto model = fit_ridge(x, y, 1.0);
  EXPECT_NEAR(model.weights(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(model.intercept, 0.0, 1e-15);
  EXPECT_EQ(predict(model, x), (std::vector<int>{-1, 1}));
}

TEST(Ridge, MatchesConjugateGradientOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + rng.below(46), p = 1 + rng.below(20);
    const Eigen::MatrixXd x = random_normal(n, p, 1000 + trial);
    const Eigen::VectorXd y = random_labels(n, rng);
    const double alpha = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
    const auto model = fit_ridge(x, y, alpha);
    const auto ref = oracle::ridge_cg(x, y, alpha);
    for (std::size_t j = 0; j < p; ++j) ASSERT_NEAR(model.weights(j), ref.weights[j], 1e-6) << trial;
    ASSERT_NEAR(model.intercept, ref.intercept, 1e-6) << trial;
  }
}

TEST(Ridge, ShrinkageMonotone) {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = random_normal(40, 8, 50 + trial);
    const Eigen::VectorXd y = random_labels(40, rng);
    const auto path = ridge_path(x, y, {0.01, 0.1, 1, 10, 100});
    for (std::size_t i = 1; i < path.size(); ++i) EXPECT_LE(path[i].weights.norm(), path[i - 1].weights.norm());
  }
}

TEST(Ridge, NoiseWeightVanishes) {
  Rng rng(23);
  Eigen::MatrixXd x = random_normal(200, 2, 24);
  Eigen::VectorXd y(200);
  for (int i = 0; i < 200; ++i) y(i) = x(i, 0) > 0 ? 1.0 : -1.0;
  for (double alpha : {0.1, 1.0, 10.0, 100.0}) {
    const auto w = fit_ridge(x, y, alpha).weights;
    EXPECT_LT(std::abs(w(1)), 0.1 * std::abs(w(0))) << alpha;
  }
  EXPECT_LT(fit_ridge(x, y, 1e6).weights.norm(), 1e-3);
}

TEST(Ridge, SingularAtZeroAlpha) {
  Eigen::MatrixXd x = random_normal(10, 3, 25);
  x.col(2) = x.col(0) * 2.0;
  Rng rng(1);
  const Eigen::VectorXd y = random_labels(10, rng);
  EXPECT_THROW(fit_ridge(x, y, 0.0), DegenerateError);
  EXPECT_NO_THROW(fit_ridge(x, y, 0.1));
}

TEST(Predict, TieGoesToPositiveAndColumnCheck) {
  RidgeModel model;
  model.weights = Eigen::VectorXd::Zero(2);
  model.columns = {"c0", "c1"};
  EXPECT_EQ(predict(model, Eigen::MatrixXd::Zero(3, 2)), (std::vector<int>{1, 1, 1}));
  auto m = make_matrix(Eigen::MatrixXd::Zero(2, 2), {1, -1});
  m.columns = {"c1", "c0"};
  EXPECT_THROW(predict(model, m), ValidationError);
}

TEST(Predict, ColumnPermutationInvariant) {
  Rng rng(26);
  const Eigen::MatrixXd x = random_normal(30, 5, 27);
  const auto model = fit_ridge(x, random_labels(30, rng), 1.0);
  std::vector<int> perm = {3, 0, 4, 1, 2};
  Eigen::MatrixXd xp(30, 5);
  RidgeModel mp = model;
  for (int j = 0; j < 5; ++j) {
    xp.col(j) = x.col(perm[j]);
    mp.weights(j) = model.weights(perm[j]);
  }
  EXPECT_EQ(predict(model, x), predict(mp, xp));
}

TEST(Metrics, HandConfusion) {
  const std::vector<int> t = {1, 1, -1, -1}, p = {1, -1, -1, -1};
  const auto m = evaluate_metrics(t, p);
  EXPECT_DOUBLE_EQ(m.balanced_accuracy, 0.75);
  EXPECT_NEAR(m.weighted_precision, 5.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(m.weighted_recall, 0.75);
  EXPECT_EQ(m.confusion[0][0], 1u);
  EXPECT_EQ(m.confusion[0][1], 1u);
  EXPECT_EQ(m.confusion[1][1], 2u);
}

TEST(Metrics, PerfectConstantAndMismatch) {
  const std::vector<int> t = {1, -1, 1, -1};
  const auto perfect = evaluate_metrics(t, t);
  EXPECT_EQ(perfect.balanced_accuracy, 1.0);
  EXPECT_EQ(perfect.weighted_precision, 1.0);
  EXPECT_EQ(perfect.weighted_recall, 1.0);
  const std::vector<int> constant = {1, 1, 1, 1};
  const auto c = evaluate_metrics(t, constant);
  EXPECT_DOUBLE_EQ(c.balanced_accuracy, 0.5);
  EXPECT_FALSE(c.flags.empty());
  EXPECT_THROW(evaluate_metrics(t, std::vector<int>{1, 1}), InvalidInput);
}

TEST(Metrics, BruteForceOracle) {
  Rng rng(28);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = rng.below(2) ? 1 : -1;
      p[i] = rng.below(2) ? 1 : -1;
    }
    const auto got = evaluate_metrics(t, p);
    const auto want = oracle::brute_metrics(t, p);
    ASSERT_NEAR(got.balanced_accuracy, want.balanced_accuracy, 1e-12);
    ASSERT_NEAR(got.weighted_precision, want.weighted_precision, 1e-12);
    ASSERT_NEAR(got.weighted_recall, want.weighted_recall, 1e-12);
    std::vector<int> tn(n), pn(n);
    for (std::size_t i = 0; i < n; ++i) {
      tn[i] = -t[i];
      pn[i] = -p[i];
    }
    ASSERT_NEAR(evaluate_metrics(tn, pn).balanced_accuracy, got.balanced_accuracy, 1e-12);
  }
}

TEST(Folds, FullScaleCounts) {
  const auto y = labels_of({735, 366});
  const auto folds = stratified_folds(y, 10, 42);
  ASSERT_EQ(folds.size(), 10u);
  std::vector<int> seen(y.size(), 0);
  for (const auto& f : folds) {
    std::size_t h = 0, l = 0;
    for (auto i : f) {
      ++seen[i];
      (y[i] > 0 ? h : l)++;
    }
    EXPECT_GE(h, 73u);
    EXPECT_LE(h, 74u);
    EXPECT_GE(l, 36u);
    EXPECT_LE(l, 37u);
    EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(Folds, SmallExactAndErrors) {
  const auto y = labels_of({10, 10});
  for (const auto& f : stratified_folds(y, 10, 1)) EXPECT_EQ(f.size(), 2u);
  EXPECT_THROW(stratified_folds(labels_of({10, 9}), 10, 1), InvalidInput);
  EXPECT_EQ(stratified_folds(y, 10, 5), stratified_folds(y, 10, 5));
}

TEST(Folds, PartitionProperty) {
  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.below(9);
    const auto y = labels_of({k + rng.below(80), k + rng.below(80)});
    const auto folds = stratified_folds(y, k, trial);
    std::vector<int> seen(y.size(), 0);
    std::vector<std::size_t> hs, ls;
    for (const auto& f : folds) {
      std::size_t h = 0;
      for (auto i : f) {
        ++seen[i];
        h += y[i] > 0;
      }
      hs.push_back(h);
      ls.push_back(f.size() - h);
    }
    for (int s : seen) ASSERT_EQ(s, 1);
    ASSERT_LE(*std::max_element(hs.begin(), hs.end()) - *std::min_element(hs.begin(), hs.end()), 1u);
    ASSERT_LE(*std::max_element(ls.begin(), ls.end()) - *std::min_element(ls.begin(), ls.end()), 1u);
  }
}

TEST(CrossValidate, SeparableIsPerfect) {
  const Eigen::MatrixXd x = testsupport::blobs(30, 3, 20.0, 30);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) y[i] = i < 30 ? 1 : -1;
  const auto r = cross_validate(make_matrix(x, y), CVOptions{});
  for (const auto& f : r.folds) EXPECT_EQ(f.balanced_accuracy, 1.0);
  EXPECT_EQ(r.mean.balanced_accuracy, 1.0);
  EXPECT_EQ(r.sd.balanced_accuracy, 0.0);
}

TEST(CrossValidate, DeterministicAndThreadIndependent) {
  Rng rng(31);
  Eigen::MatrixXd x = random_normal(120, 6, 32);
  std::vector<int> y(120);
  for (int i = 0; i < 120; ++i) y[i] = x(i, 0) + 0.8 * rng.normal() > 0 ? 1 : -1;
  const auto m = make_matrix(x, y);
  CVOptions opts;
  opts.seed = 9;
  const auto a = cross_validate(m, opts);
  opts.threads = 4;
  const auto b = cross_validate(m, opts);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  opts.scaling = Scaling::global;
  EXPECT_EQ(cross_validate(m, opts).scaling, Scaling::global);
}

TEST(CrossValidate, SummaryRecomputable) {
  Rng rng(33);
  Eigen::MatrixXd x = random_normal(150, 4, 34);
  std::vector<int> y(150);
  for (int i = 0; i < 150; ++i) y[i] = x(i, 1) + rng.normal() > 0 ? 1 : -1;
  const auto r = cross_validate(make_matrix(x, y), CVOptions{});
  ASSERT_EQ(r.folds.size(), 10u);
  std::vector<double> ba;
  for (const auto& f : r.folds) {
    ba.push_back(f.balanced_accuracy);
    std::vector<int> t, p;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (std::size_t c = 0; c < f.confusion[a][b]; ++c) {
          t.push_back(a == 0 ? 1 : -1);
          p.push_back(b == 0 ? 1 : -1);
        }
    EXPECT_NEAR(oracle::brute_metrics(t, p).balanced_accuracy, f.balanced_accuracy, 1e-12);
  }
  EXPECT_NEAR(r.mean.balanced_accuracy, stats::mean(ba), 1e-12);
  EXPECT_NEAR(r.sd.balanced_accuracy, stats::sample_sd(ba), 1e-12);
  EXPECT_GE(r.mean.balanced_accuracy, *std::min_element(ba.begin(), ba.end()));
  EXPECT_LE(r.mean.balanced_accuracy, *std::max_element(ba.begin(), ba.end()));
  const auto j = r.to_json();
  for (const char* key : {"seed", "alpha", "k", "feature_set", "folds", "mean", "sd"}) EXPECT_TRUE(j.contains(key)) << key;
}

// Labels independent of features: mean balanced accuracy over 100 seeds.
TEST(CrossValidate, PermutationChanceLevel) {
  const Eigen::MatrixXd x = random_normal(200, 5, 35);
  double total = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(500 + seed);
    std::vector<int> y(200);
    for (int i = 0; i < 200; ++i) y[i] = i < 100 ? 1 : -1;
    rng.shuffle(std::span<int>(y));
    CVOptions opts;
    opts.seed = seed;
    total += cross_validate(make_matrix(x, y), opts).mean.balanced_accuracy;
  }
  EXPECT_NEAR(total / 100, 0.5, 0.08);
}

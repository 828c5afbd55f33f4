#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "psyling/featsel.hpp"
#include "synthetic.hpp"

using namespace psyling;
using testsupport::make_matrix;
using testsupport::random_normal;

namespace {

Eigen::MatrixXd euclidean(const Eigen::MatrixXd& points) {
  const auto n = points.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (points.row(i) - points.row(j)).norm();
  return d;
}

Eigen::MatrixXd correlation_distance(std::size_t features, std::uint64_t seed) {
  Eigen::MatrixXd x = random_normal(30, features, seed);
  // Shared factor so correlations are not all near zero.
  const Eigen::MatrixXd f = random_normal(30, 1, seed + 1);
  for (std::size_t j = 0; j < features; ++j) x.col(j) += f.col(0) * (0.3 * j);
  return correlation_to_distance(spearman_matrix(x));
}

LinkageTree random_tree(std::size_t n, std::uint64_t seed) {
  return ward_linkage(euclidean(random_normal(n, 3, seed)));
}

bool same_merge(const oracle::OracleMerge& a, const oracle::OracleMerge& b) {
  return (a.left == b.left && a.right == b.right) || (a.left == b.right && a.right == b.left);
}

bool coarsens(const oracle::Partition& coarse, const oracle::Partition& fine) {
  for (const auto& f : fine) {
    bool inside = false;
    for (const auto& c : coarse) inside |= std::includes(c.begin(), c.end(), f.begin(), f.end());
    if (!inside) return false;
  }
  return true;
}

std::vector<int> half_labels(std::size_t n) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i < n / 2 ? 1 : -1;
  return y;
}

}  // namespace

TEST(Spearman, SelfAndCube) {
  Eigen::MatrixXd x = random_normal(25, 1, 1);
  Eigen::MatrixXd two(25, 2);
  two.col(0) = x.col(0);
  two.col(1) = x.col(0).array().cube();
  const auto rho = spearman_matrix(two);
  EXPECT_NEAR(rho(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(rho(0, 1), 1.0, 1e-12);
}

TEST(Spearman, TiedDataMatchesNaiveOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::MatrixXd x(40, 5);
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 5; ++j) x(i, j) = static_cast<double>(rng.below(2 + j * 2));
    for (int j = 0; j < 5; ++j) x(0, j) = 100;  // no constant column
    const auto got = spearman_matrix(x);
    const auto want = oracle::naive_spearman(x);
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Spearman, AverageRanks) {
  const std::vector<double> xs = {3, 1, 3, 2, 3};
  EXPECT_EQ(average_ranks(xs), (std::vector<double>{4, 1, 4, 2, 4}));
  EXPECT_EQ(average_ranks(xs), oracle::naive_ranks(xs));
}

TEST(Spearman, MonotoneInvariantSymmetricUnitDiagonal) {
  const Eigen::MatrixXd x = random_normal(60, 6, 3);
  const auto base = spearman_matrix(x);
  Eigen::MatrixXd t = x;
  t.col(0) = x.col(0).array().exp();
  t.col(1) = x.col(1).array().cube() * 5.0 - 2.0;
  t.col(2) = (x.col(2).array() + 10.0).log();
  t.col(3) = x.col(3).array().atan();
  EXPECT_LT((spearman_matrix(t) - base).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((base - base.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  for (int j = 0; j < 6; ++j) EXPECT_EQ(base(j, j), 1.0);
}

TEST(Spearman, Errors) {
  Eigen::MatrixXd x = random_normal(10, 2, 4);
  x.col(1).setConstant(2.0);
  EXPECT_THROW(spearman_matrix(x), DegenerateError);
  EXPECT_THROW(spearman_matrix(random_normal(1, 2, 5)), InvalidInput);
}

TEST(Distance, Formulas) {
  Eigen::MatrixXd rho(3, 3);
  rho << 1, -1, 0, -1, 1, 0.5, 0, 0.5, 1;
  const auto d = correlation_to_distance(rho);
  EXPECT_EQ(d(0, 0), 0.0);
  EXPECT_EQ(d(0, 1), 0.0);
  EXPECT_EQ(d(0, 2), 1.0);
  EXPECT_EQ(d(1, 2), 0.5);
  EXPECT_EQ(correlation_to_distance(rho, DistanceKind::signed_)(0, 1), 2.0);
  EXPECT_EQ(parse_distance_kind("signed"), DistanceKind::signed_);
}

TEST(Ward, TwoItems) {
  Eigen::MatrixXd d(2, 2);
  d << 0, 0.8, 0.8, 0;
  const auto tree = ward_linkage(d);
  ASSERT_EQ(tree.merges.size(), 1u);
  EXPECT_DOUBLE_EQ(tree.merges[0].height, 0.8);
  EXPECT_EQ(tree.merges[0].size, 2u);
  EXPECT_DOUBLE_EQ(max_cophenetic(tree), 0.8);
  EXPECT_THROW(ward_linkage(Eigen::MatrixXd::Zero(1, 1)), InvalidInput);
}

TEST(Ward, MatchesGreedyEssOracle) {
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const auto d = trial % 2 ? euclidean(random_normal(n, 4, 200 + trial)) : correlation_distance(n, 300 + trial);
    const auto tree = ward_linkage(d);
    const auto got = oracle::tree_merges(tree);
    const auto want = oracle::ward_greedy(d);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_TRUE(same_merge(got[i], want[i])) << "trial " << trial << " merge " << i;
      ASSERT_NEAR(got[i].height, want[i].height, 1e-10);
    }
  }
}

TEST(Ward, MonotoneHeightsAndSizes) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto tree = random_tree(3 + trial % 20, 400 + trial);
    ASSERT_EQ(tree.merges.size(), tree.leaves - 1);
    std::vector<std::size_t> size(tree.leaves, 1);
    for (std::size_t i = 0; i < tree.merges.size(); ++i) {
      const auto& m = tree.merges[i];
      if (i) ASSERT_GE(m.height, tree.merges[i - 1].height);
      ASSERT_EQ(m.size, size[m.a] + size[m.b]);
      size.push_back(m.size);
    }
    ASSERT_EQ(tree.merges.back().size, tree.leaves);
  }
}

TEST(Cophenetic, MatchesLcaOracle) {
  for (int trial = 0; trial < 20; ++trial) {
    const auto tree = random_tree(8, 500 + trial);
    EXPECT_LT((cophenetic_matrix(tree) - oracle::cophenetic_lca(tree)).cwiseAbs().maxCoeff(), 1e-15);
    const auto& first = tree.merges.front();
    EXPECT_EQ(cophenetic_matrix(tree)(first.a, first.b), first.height);
  }
}

TEST(FlatClusters, Extremes) {
  const auto tree = random_tree(9, 600);
  EXPECT_EQ(flat_clusters(tree, tree.merges.front().height * 0.5).clusters, 9u);
  EXPECT_EQ(flat_clusters(tree, max_cophenetic(tree)).clusters, 1u);
  EXPECT_DOUBLE_EQ(default_cut(tree, 1.25), std::min(1.25, max_cophenetic(tree) / 2));
  EXPECT_THROW(flat_clusters(tree, -1.0), InvalidInput);
}

TEST(FlatClusters, MatchesRecursiveCut) {
  for (int trial = 0; trial < 100; ++trial) {
    const auto tree = random_tree(4 + trial % 12, 700 + trial);
    for (double t : {1.25, 0.95, 0.5 * max_cophenetic(tree), 2.0}) {
      const auto flat = flat_clusters(tree, t);
      ASSERT_EQ(oracle::to_partition(flat.cluster_of), oracle::recursive_cut(tree, t));
      ASSERT_EQ(flat.cluster_of[0], 0u);
    }
  }
}

TEST(FlatClusters, MonotoneInThreshold) {
  for (int trial = 0; trial < 100; ++trial) {
    const auto tree = random_tree(3 + trial % 15, 800 + trial);
    oracle::Partition prev = oracle::to_partition(flat_clusters(tree, 0.0).cluster_of);
    for (double t = 0.05; t <= max_cophenetic(tree) + 0.1; t += 0.05) {
      const auto cur = oracle::to_partition(flat_clusters(tree, t).cluster_of);
      ASSERT_TRUE(coarsens(cur, prev));
      ASSERT_LE(cur.size(), prev.size());
      prev = cur;
    }
  }
}

TEST(Representatives, ForcedStructure) {
  Eigen::MatrixXd x(50, 4);
  const Eigen::MatrixXd base = random_normal(50, 2, 900);
  x.col(0) = base.col(0);
  x.col(1) = base.col(0) * 2.0;
  x.col(2) = base.col(0).array().exp();
  x.col(3) = base.col(1);
  const auto rho = spearman_matrix(x);
  const auto tree = ward_linkage(correlation_to_distance(rho));
  const auto flat = flat_clusters(tree, 0.5);
  const auto reps = select_representatives(flat, rho);
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_EQ(reps, (std::vector<std::size_t>{0, 3}));
}

TEST(Representatives, MatchesBruteForceMedoid) {
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t p = 2 + trial % 11;
    Eigen::MatrixXd x = random_normal(40, p, 1000 + trial);
    const Eigen::MatrixXd f = random_normal(40, 2, 2000 + trial);
    for (std::size_t j = 0; j < p; ++j) x.col(j) += f.col(j % 2) * 1.5;
    const auto rho = spearman_matrix(x);
    const auto tree = ward_linkage(correlation_to_distance(rho));
    auto flat = flat_clusters(tree, default_cut(tree));
    const auto reps = select_representatives(flat, rho);
    ASSERT_EQ(reps.size(), flat.clusters);
    ASSERT_EQ(reps, oracle::medoids(oracle::to_partition(flat.cluster_of), rho));
    for (auto r : reps) {
      // The representative's mean |rho| is at least every other member's.
      const auto c = flat.cluster_of[r];
      auto score = [&](std::size_t i) {
        double s = 0;
        std::size_t n = 0;
        for (std::size_t j = 0; j < p; ++j)
          if (j != i && flat.cluster_of[j] == c) {
            s += std::abs(rho(i, j));
            ++n;
          }
        return n ? s / n : 1.0;
      };
      for (std::size_t i = 0; i < p; ++i)
        if (flat.cluster_of[i] == c) ASSERT_GE(score(r) + 1e-15, score(i));
    }
  }
}

// Nineteen independent blocks of noisy copies cut at 0.95.
TEST(FeatureAnalysis, NineteenBlocks) {
  std::vector<std::size_t> sizes(19, 4);
  sizes[0] = sizes[1] = 5;
  const Eigen::MatrixXd x = testsupport::block_matrix(400, sizes, 0.1, 17);
  const auto m = make_matrix(x, half_labels(400));
  ASSERT_EQ(m.cols(), 78u);
  FeatureAnalysisOptions opts;
  opts.cut = 0.95;
  opts.run_kmeans = false;
  const auto folds = stratified_folds(to_int_labels(m.labels), 10, 1);
  const auto full = cross_validate(m, folds, opts.cv);
  const auto fa = run_feature_analysis(m, full, folds, opts);
  EXPECT_EQ(fa.selected.size(), 19u);
  EXPECT_EQ(fa.clustering.clusters, 19u);
}

TEST(FeatureAnalysis, IndependentFeaturesAllKept) {
  const Eigen::MatrixXd x = random_normal(120, 5, 18);
  const auto m = make_matrix(x, half_labels(120));
  FeatureAnalysisOptions opts;
  opts.run_kmeans = false;
  const auto folds = stratified_folds(to_int_labels(m.labels), 10, 2);
  const auto full = cross_validate(m, folds, opts.cv);
  const auto tree = ward_linkage(correlation_to_distance(spearman_matrix(x)));
  opts.cut = tree.merges.front().height * 0.5;
  const auto fa = run_feature_analysis(m, full, folds, opts);
  EXPECT_EQ(fa.selected, m.columns);
  EXPECT_EQ(fa.reduced.mean.balanced_accuracy, full.mean.balanced_accuracy);
  for (const auto& c : fa.comparisons) EXPECT_FALSE(c.result.has_value());
}

// Duplicated informative features: the reduced model keeps one per block.
TEST(FeatureAnalysis, RedundantMatrixReducedCloseToFull) {
  const std::size_t n = 400;
  Eigen::MatrixXd x = testsupport::block_matrix(n, {4, 4, 4}, 0.15, 19);
  std::vector<int> y(n);
  Rng rng(20);
  for (std::size_t i = 0; i < n; ++i) y[i] = x(i, 0) + 0.5 * x(i, 4) + 0.8 * rng.normal() > 0 ? 1 : -1;
  const auto m = make_matrix(x, y);
  FeatureAnalysisOptions opts;
  const auto folds = stratified_folds(to_int_labels(m.labels), 10, 3);
  const auto full = cross_validate(m, folds, opts.cv);
  const auto fa = run_feature_analysis(m, full, folds, opts);
  EXPECT_EQ(fa.selected.size(), 3u);
  EXPECT_LT(std::abs(fa.reduced.mean.balanced_accuracy - full.mean.balanced_accuracy), 0.05);
  ASSERT_TRUE(fa.kmeans.has_value());
  ASSERT_TRUE(fa.kmeans_cv.has_value());
  EXPECT_EQ(fa.kmeans_cv->folds.size(), 10u);
  const auto j = fa.to_json();
  EXPECT_TRUE(j.contains("selected"));
}

TEST(KMeans, SeparatedBlobs) {
  const Eigen::MatrixXd x = testsupport::blobs(50, 3, 30.0, 21);
  const auto y = half_labels(100);
  const auto r = kmeans2(x, 4, y);
  ASSERT_TRUE(r.agreement.has_value());
  EXPECT_EQ(*r.agreement, 1.0);
  EXPECT_EQ(kmeans2(x, 4, y).assignment, r.assignment);
}

TEST(KMeans, IdenticalPointsGiveMajorityShare) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(10, 2);
  const std::vector<int> y = {1, 1, 1, 1, 1, 1, 1, -1, -1, -1};
  const auto r = kmeans2(x, 1, y);
  EXPECT_DOUBLE_EQ(*r.agreement, 0.7);
}

TEST(KMeans, AgreementUsesBetterMap) {
  const std::vector<int> a = {0, 0, 1, 1}, y = {-1, -1, 1, 1};
  EXPECT_EQ(cluster_label_agreement(a, y), 1.0);
}

TEST(Compare, PairedOverFolds) {
  CVReport a, b;
  for (std::size_t f = 0; f < 10; ++f) {
    FoldMetrics ma, mb;
    ma.fold = mb.fold = f;
    ma.balanced_accuracy = 0.9 + 0.01 * (f % 3);
    mb.balanced_accuracy = 0.7 + 0.02 * (f % 4);
    ma.weighted_precision = mb.weighted_precision = 0.8;
    ma.weighted_recall = 0.8 + 0.001 * f;
    mb.weighted_recall = 0.8;
    a.folds.push_back(ma);
    b.folds.push_back(mb);
  }
  const auto tests = compare_cv_reports(a, b);
  ASSERT_EQ(tests.size(), 3u);
  ASSERT_TRUE(tests[0].result.has_value());
  EXPECT_EQ(tests[0].result->df1, 9.0);
  EXPECT_LT(tests[0].result->p, 0.01);
  EXPECT_FALSE(tests[1].result.has_value());
  EXPECT_FALSE(tests[1].note.empty());
}

TEST(Export, NewickAndJson) {
  Eigen::MatrixXd d(3, 3);
  d << 0, 0.2, 0.9, 0.2, 0, 0.8, 0.9, 0.8, 0;
  const auto tree = ward_linkage(d);
  const auto newick = to_newick(tree, {"a", "b", "c"});
  EXPECT_EQ(newick.back(), ';');
  EXPECT_NE(newick.find("a"), std::string::npos);
  const auto j = linkage_to_json(tree, {"a", "b", "c"});
  EXPECT_EQ(j["merges"].size(), 2u);
}

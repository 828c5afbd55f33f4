#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "psyling/classify.hpp"
#include "psyling/matrix.hpp"
#include "psyling/stats.hpp"

namespace psyling {

/// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> xs);

/// Pairwise Spearman correlation of the columns of x. Throws DegenerateError
/// on a constant column and InvalidInput with fewer than two rows.
Eigen::MatrixXd spearman_matrix(const Eigen::MatrixXd& x);

enum class DistanceKind {
  absolute,  // 1 - |rho|
  signed_    // 1 - rho
};
std::string_view to_string(DistanceKind kind);
DistanceKind parse_distance_kind(std::string_view text);

Eigen::MatrixXd correlation_to_distance(const Eigen::MatrixXd& rho, DistanceKind kind = DistanceKind::absolute);

struct Merge {
  std::size_t a = 0;  // cluster ids: leaves 0..n-1, merge i creates n+i
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct LinkageTree {
  std::size_t leaves = 0;
  std::vector<Merge> merges;
};

/// Agglomerative Ward clustering of a distance matrix using the
/// Lance-Williams update. Ties go to the smallest (a, b) id pair.
LinkageTree ward_linkage(const Eigen::MatrixXd& distance);

/// Height of the last merge.
double max_cophenetic(const LinkageTree& tree);
/// Leaf-by-leaf height of the lowest common merge.
Eigen::MatrixXd cophenetic_matrix(const LinkageTree& tree);

struct FlatClustering {
  std::vector<std::size_t> cluster_of;  // per leaf; clusters numbered by first leaf
  std::size_t clusters = 0;
  double threshold = 0.0;
  std::vector<std::size_t> representatives;  // leaf indices, ascending; filled by select_representatives
};

/// Partition in which no cluster contains a merge above t.
FlatClustering flat_clusters(const LinkageTree& tree, double t);

/// min(cap, max_cophenetic / 2).
double default_cut(const LinkageTree& tree, double cap = 1.25);

/// Per cluster, the member with the highest mean |rho| to the other members
/// (lowest index on ties). Returned ascending.
std::vector<std::size_t> select_representatives(const FlatClustering& clustering, const Eigen::MatrixXd& rho);

struct KMeansResult {
  std::vector<int> assignment;  // 0 or 1 per row
  Eigen::MatrixXd centroids;    // 2 x cols
  std::size_t iterations = 0;
  std::size_t reseeds = 0;
  std::optional<double> agreement;  // with labels, best of the two cluster-to-label maps
};

/// Two-cluster Lloyd iterations from two distinct random rows.
KMeansResult kmeans2(const Eigen::MatrixXd& x, std::uint64_t seed, std::span<const int> labels = {},
                     std::size_t max_iterations = 300);

/// Best accuracy over the two cluster-to-label maps.
double cluster_label_agreement(std::span<const int> assignment, std::span<const int> labels);

/// k-means diagnostic over shared folds: clusters the training rows, names
/// each cluster by the better map on the training labels and scores the
/// validation rows by nearest centroid.
CVReport kmeans_cross_validate(const FeatureMatrix& m, const std::vector<std::vector<std::size_t>>& folds,
                               const CVOptions& opts);

struct FeatureAnalysisOptions {
  std::optional<double> cut;  // default_cut(tree, cut_cap) when empty
  double cut_cap = 1.25;
  DistanceKind distance = DistanceKind::absolute;
  CVOptions cv;
  bool run_kmeans = true;
};

struct ComparisonTest {
  std::string metric;
  std::optional<stats::TestResult> result;
  std::string note;  // set when the test is degenerate
};

struct FeatureAnalysis {
  std::vector<std::string> columns;
  Eigen::MatrixXd rho;
  LinkageTree tree;
  double cut = 0.0;
  FlatClustering clustering;
  std::vector<std::string> selected;
  CVReport reduced;
  std::vector<ComparisonTest> comparisons;  // full vs reduced over shared folds
  std::optional<KMeansResult> kmeans;
  std::optional<CVReport> kmeans_cv;

  nlohmann::json to_json() const;
};

/// Spearman, distance, Ward, cut, representatives, ridge CV on the reduced
/// matrix over `folds`, then paired t-tests against `full`.
FeatureAnalysis run_feature_analysis(const FeatureMatrix& m, const CVReport& full,
                                     const std::vector<std::vector<std::size_t>>& folds,
                                     const FeatureAnalysisOptions& opts);

/// Paired t-tests on ba/wp/wr across matching folds. Degenerate tests are
/// recorded with a note.
std::vector<ComparisonTest> compare_cv_reports(const CVReport& a, const CVReport& b);

std::string to_newick(const LinkageTree& tree, const std::vector<std::string>& names);
nlohmann::json linkage_to_json(const LinkageTree& tree, const std::vector<std::string>& names);

}  // namespace psyling

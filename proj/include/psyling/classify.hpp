#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "psyling/matrix.hpp"

namespace psyling {

struct RidgeModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double alpha = 1.0;
  std::vector<std::string> columns;  // training column order
};

/// Penalized least squares on labels encoded +1/-1. The intercept is not
/// penalized: columns and labels are centered, the weights solve
/// (Xc'Xc + alpha I) w = Xc'yc and the intercept restores the means.
/// alpha = 0 with a rank-deficient design throws DegenerateError.
RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                     std::vector<std::string> columns = {});
RidgeModel fit_ridge(const FeatureMatrix& m, double alpha);

/// One model per alpha, same data.
std::vector<RidgeModel> ridge_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   const std::vector<double>& alphas);

Eigen::VectorXd decision_scores(const RidgeModel& model, const Eigen::MatrixXd& x);
/// sign(w.x + b); a score of exactly 0 predicts +1.
std::vector<int> predict(const RidgeModel& model, const Eigen::MatrixXd& x);
/// Checks the matrix columns against the training order first.
std::vector<int> predict(const RidgeModel& model, const FeatureMatrix& m);

struct FoldMetrics {
  std::size_t fold = 0;
  double balanced_accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  /// confusion[true][predicted]; index 0 = +1 (human), 1 = -1 (llm).
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  std::vector<std::string> flags;
};

/// Labels are +1/-1. Per-class precision and recall from the confusion
/// matrix; weighted versions use true-class frequencies; balanced accuracy
/// averages recall over the classes present in y_true. An undefined
/// precision counts as 0 and is flagged.
FoldMetrics evaluate_metrics(std::span<const int> y_true, std::span<const int> y_pred);

/// k disjoint validation index sets (each sorted). Each class is shuffled
/// with its own seeded stream and dealt round-robin; the second class
/// continues where the first stopped so fold sizes stay balanced.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t k,
                                                       std::uint64_t seed);

enum class Scaling { fold_safe, global };
std::string_view to_string(Scaling s);

struct CVOptions {
  std::size_t k = 10;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  Scaling scaling = Scaling::fold_safe;
  std::string feature_set = "full";
  unsigned threads = 1;
};

struct MetricSummary {
  double balanced_accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
};

struct CVReport {
  std::uint64_t seed = 0;
  double alpha = 1.0;
  std::size_t k = 10;
  std::string feature_set;
  Scaling scaling = Scaling::fold_safe;
  std::vector<std::string> columns;
  std::vector<FoldMetrics> folds;
  MetricSummary mean;
  MetricSummary sd;  // sample SD over folds

  nlohmann::json to_json() const;
};

/// Mean and sample SD of the fold metrics.
void summarize_folds(CVReport& report);

/// Ridge classification over stratified folds built from opts.seed.
CVReport cross_validate(const FeatureMatrix& m, const CVOptions& opts);
/// Same, over caller-provided folds (shared between models for paired tests).
CVReport cross_validate(const FeatureMatrix& m, const std::vector<std::vector<std::size_t>>& folds,
                        const CVOptions& opts);

std::vector<int> to_int_labels(const std::vector<SourceLabel>& labels);

}  // namespace psyling

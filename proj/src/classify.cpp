#include "psyling/classify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "psyling/stats.hpp"

namespace psyling {

namespace {

void require_both_classes(const Eigen::VectorXd& y) {
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] > 0) pos = true;
    if (y[i] < 0) neg = true;
  }
  if (!pos || !neg) throw InvalidInput("ridge fit needs both classes in the training labels");
}

}  // namespace

RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                     std::vector<std::string> columns) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("ridge alpha must be >= 0");
  if (x.rows() != y.size()) throw InvalidInput("ridge fit: row count differs from label count");
  if (x.rows() < 2 || x.cols() < 1) throw InvalidInput("ridge fit: needs at least two rows and one column");
  require_both_classes(y);

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += alpha;
  const Eigen::VectorXd rhs = xc.transpose() * yc;

  RidgeModel model;
  model.alpha = alpha;
  if (alpha == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    if (qr.rank() < xc.cols()) {
      throw DegenerateError("ridge system is singular at alpha = 0; use alpha > 0");
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    model.weights = ldlt.solve(rhs);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw DegenerateError("ridge system could not be factored");
    model.weights = llt.solve(rhs);
  }
  model.intercept = y_mean - x_mean.dot(model.weights);
  if (!model.weights.allFinite() || !std::isfinite(model.intercept)) {
    throw DegenerateError("ridge solution is not finite");
  }
  if (columns.empty()) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) columns.push_back("x" + std::to_string(j));
  }
  model.columns = std::move(columns);
  return model;
}

RidgeModel fit_ridge(const FeatureMatrix& m, double alpha) {
  m.validate();
  return fit_ridge(m.values, m.encoded_labels(), alpha, m.columns);
}

std::vector<RidgeModel> ridge_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   const std::vector<double>& alphas) {
  std::vector<RidgeModel> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(fit_ridge(x, y, a));
  return out;
}

Eigen::VectorXd decision_scores(const RidgeModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.weights.size()) {
    throw ValidationError("predict: matrix has " + std::to_string(x.cols()) + " columns, model expects " +
                          std::to_string(model.weights.size()));
  }
  return (x * model.weights).array() + model.intercept;
}

std::vector<int> predict(const RidgeModel& model, const Eigen::MatrixXd& x) {
  const Eigen::VectorXd scores = decision_scores(model, x);
  std::vector<int> out(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i) out[static_cast<std::size_t>(i)] = scores[i] >= 0.0 ? 1 : -1;
  return out;
}

std::vector<int> predict(const RidgeModel& model, const FeatureMatrix& m) {
  if (m.columns != model.columns) throw ValidationError("predict: matrix columns differ from the training columns");
  return predict(model, m.values);
}

FoldMetrics evaluate_metrics(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) throw InvalidInput("evaluate_metrics: label vectors differ in length");
  if (y_true.empty()) throw InvalidInput("evaluate_metrics: no labels");
  auto index = [](int label) -> std::size_t {
    if (label == 1) return 0;
    if (label == -1) return 1;
    throw InvalidInput("evaluate_metrics: labels must be +1 or -1");
  };
  FoldMetrics m;
  for (std::size_t i = 0; i < y_true.size(); ++i) ++m.confusion[index(y_true[i])][index(y_pred[i])];

  const double n = static_cast<double>(y_true.size());
  double recall_sum = 0.0;
  std::size_t classes_present = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const double support = static_cast<double>(m.confusion[c][0] + m.confusion[c][1]);
    const double predicted = static_cast<double>(m.confusion[0][c] + m.confusion[1][c]);
    const double tp = static_cast<double>(m.confusion[c][c]);
    const char* name = c == 0 ? "human" : "llm";
    double precision = 0.0;
    if (predicted > 0) {
      precision = tp / predicted;
    } else if (support > 0) {
      m.flags.push_back(std::string("precision undefined for class ") + name + " (no predictions); set to 0");
    }
    if (support > 0) {
      const double recall = tp / support;
      recall_sum += recall;
      ++classes_present;
      m.weighted_precision += support / n * precision;
      m.weighted_recall += support / n * recall;
    }
  }
  if (classes_present < 2) m.flags.push_back("only one class present in y_true; balanced accuracy over that class");
  m.balanced_accuracy = recall_sum / static_cast<double>(classes_present);
  return m;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw InvalidInput("stratified_folds: k must be >= 2");
  std::vector<std::size_t> human, llm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      human.push_back(i);
    } else if (labels[i] == -1) {
      llm.push_back(i);
    } else {
      throw InvalidInput("stratified_folds: labels must be +1 or -1");
    }
  }
  if (human.size() < k || llm.size() < k) {
    throw InvalidInput("stratified_folds: each class needs at least k = " + std::to_string(k) +
                       " members (human " + std::to_string(human.size()) + ", llm " +
                       std::to_string(llm.size()) + ")");
  }
  std::vector<std::vector<std::size_t>> folds(k);
  Rng rng_h(derive_seed(seed, "folds/human"));
  Rng rng_l(derive_seed(seed, "folds/llm"));
  rng_h.shuffle(std::span<std::size_t>(human));
  rng_l.shuffle(std::span<std::size_t>(llm));
  for (std::size_t i = 0; i < human.size(); ++i) folds[i % k].push_back(human[i]);
  const std::size_t offset = human.size() % k;
  for (std::size_t i = 0; i < llm.size(); ++i) folds[(offset + i) % k].push_back(llm[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::string_view to_string(Scaling s) { return s == Scaling::fold_safe ? "fold_safe" : "global"; }

std::vector<int> to_int_labels(const std::vector<SourceLabel>& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (auto l : labels) out.push_back(l == SourceLabel::human ? 1 : -1);
  return out;
}

void summarize_folds(CVReport& report) {
  std::vector<double> ba, wp, wr;
  for (const auto& f : report.folds) {
    ba.push_back(f.balanced_accuracy);
    wp.push_back(f.weighted_precision);
    wr.push_back(f.weighted_recall);
  }
  if (ba.empty()) throw InvalidInput("no folds to summarize");
  report.mean = {stats::mean(ba), stats::mean(wp), stats::mean(wr)};
  if (ba.size() >= 2) {
    report.sd = {stats::sample_sd(ba), stats::sample_sd(wp), stats::sample_sd(wr)};
  } else {
    report.sd = {};
  }
}

CVReport cross_validate(const FeatureMatrix& m, const CVOptions& opts) {
  const auto labels = to_int_labels(m.labels);
  return cross_validate(m, stratified_folds(labels, opts.k, opts.seed), opts);
}

CVReport cross_validate(const FeatureMatrix& m, const std::vector<std::vector<std::size_t>>& folds,
                        const CVOptions& opts) {
  m.validate();
  const auto n = static_cast<Eigen::Index>(m.rows());
  std::vector<int> fold_of(m.rows(), -1);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t i : folds[f]) {
      if (i >= m.rows() || fold_of[i] != -1) throw InvalidInput("folds are not a partition of the rows");
      fold_of[i] = static_cast<int>(f);
    }
  }
  if (std::find(fold_of.begin(), fold_of.end(), -1) != fold_of.end()) {
    throw InvalidInput("folds do not cover every row");
  }

  Eigen::MatrixXd x = m.values;
  if (opts.scaling == Scaling::global) x = fit_scaler(m.columns, x, true).apply(x);
  const Eigen::VectorXd y = m.encoded_labels();
  const auto int_labels = to_int_labels(m.labels);

  CVReport report;
  report.seed = opts.seed;
  report.alpha = opts.alpha;
  report.k = folds.size();
  report.feature_set = opts.feature_set;
  report.scaling = opts.scaling;
  report.columns = m.columns;
  report.folds.resize(folds.size());

  auto run_fold = [&](std::size_t f) {
    const auto& valid = folds[f];
    const Eigen::Index n_valid = static_cast<Eigen::Index>(valid.size());
    Eigen::MatrixXd x_train(n - n_valid, x.cols()), x_valid(n_valid, x.cols());
    Eigen::VectorXd y_train(n - n_valid);
    std::vector<int> y_valid;
    Eigen::Index tr = 0, va = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (fold_of[static_cast<std::size_t>(i)] == static_cast<int>(f)) {
        x_valid.row(va++) = x.row(i);
        y_valid.push_back(int_labels[static_cast<std::size_t>(i)]);
      } else {
        x_train.row(tr) = x.row(i);
        y_train[tr++] = y[i];
      }
    }
    if (opts.scaling == Scaling::fold_safe) {
      const ScalerParams scaler = fit_scaler(m.columns, x_train, true);
      x_train = scaler.apply(x_train);
      x_valid = scaler.apply(x_valid);
    }
    const RidgeModel model = fit_ridge(x_train, y_train, opts.alpha, m.columns);
    FoldMetrics metrics = evaluate_metrics(y_valid, predict(model, x_valid));
    metrics.fold = f;
    report.folds[f] = std::move(metrics);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(folds.size())));
  if (threads == 1) {
    for (std::size_t f = 0; f < folds.size(); ++f) run_fold(f);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t f = w; f < folds.size(); f += threads) run_fold(f);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  summarize_folds(report);
  return report;
}

nlohmann::json CVReport::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["alpha"] = alpha;
  j["k"] = k;
  j["feature_set"] = feature_set;
  j["scaling"] = std::string(to_string(scaling));
  j["columns"] = columns;
  j["folds"] = nlohmann::json::array();
  for (const auto& f : folds) {
    nlohmann::json fj;
    fj["fold"] = f.fold;
    fj["ba"] = f.balanced_accuracy;
    fj["wp"] = f.weighted_precision;
    fj["wr"] = f.weighted_recall;
    fj["confusion"] = {{"human_as_human", f.confusion[0][0]},
                       {"human_as_llm", f.confusion[0][1]},
                       {"llm_as_human", f.confusion[1][0]},
                       {"llm_as_llm", f.confusion[1][1]}};
    if (!f.flags.empty()) fj["flags"] = f.flags;
    j["folds"].push_back(std::move(fj));
  }
  j["mean"] = {{"ba", mean.balanced_accuracy}, {"wp", mean.weighted_precision}, {"wr", mean.weighted_recall}};
  j["sd"] = {{"ba", sd.balanced_accuracy}, {"wp", sd.weighted_precision}, {"wr", sd.weighted_recall}};
  return j;
}

}  // namespace psyling

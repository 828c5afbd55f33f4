#include "psyling/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace psyling {

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

Eigen::MatrixXd spearman_matrix(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw InvalidInput("spearman_matrix: needs at least two rows");
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd ranked(x.rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::VectorXd col = x.col(j);
    const auto r = average_ranks(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
    ranked.col(j) = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    ranked.col(j).array() -= ranked.col(j).mean();
    const double norm = ranked.col(j).norm();
    if (!(norm > 0.0)) throw DegenerateError("spearman_matrix: column " + std::to_string(j) + " is constant");
    ranked.col(j) /= norm;
  }
  Eigen::MatrixXd rho = ranked.transpose() * ranked;
  for (Eigen::Index i = 0; i < p; ++i) {
    rho(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double v = std::clamp(rho(i, j), -1.0, 1.0);
      rho(i, j) = rho(j, i) = v;
    }
  }
  return rho;
}

std::string_view to_string(DistanceKind kind) { return kind == DistanceKind::absolute ? "1-|rho|" : "1-rho"; }

DistanceKind parse_distance_kind(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "abs" || t == "absolute" || t == "1-|rho|") return DistanceKind::absolute;
  if (t == "signed" || t == "1-rho") return DistanceKind::signed_;
  throw ValidationError("unknown distance kind '" + std::string(text) + "' (expected abs or signed)");
}

Eigen::MatrixXd correlation_to_distance(const Eigen::MatrixXd& rho, DistanceKind kind) {
  Eigen::MatrixXd d = kind == DistanceKind::absolute ? Eigen::MatrixXd(1.0 - rho.array().abs())
                                                     : Eigen::MatrixXd(1.0 - rho.array());
  d.diagonal().setZero();
  return d;
}

LinkageTree ward_linkage(const Eigen::MatrixXd& distance) {
  const auto n = static_cast<std::size_t>(distance.rows());
  if (distance.rows() != distance.cols()) throw InvalidInput("ward_linkage: distance matrix must be square");
  if (n < 2) throw InvalidInput("ward_linkage: needs at least two items");
  if (!distance.allFinite()) throw InvalidInput("ward_linkage: distance matrix has non-finite values");

  // Slots 0..2n-2 hold cluster ids; d is indexed by id.
  const std::size_t total = 2 * n - 1;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  d.topLeftCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = distance;
  std::vector<std::size_t> size(total, 1);
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);

  LinkageTree tree;
  tree.leaves = n;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double v = d(static_cast<Eigen::Index>(active[x]), static_cast<Eigen::Index>(active[y]));
        if (v < best) {
          best = v;
          bi = x;
          bj = y;
        }
      }
    }
    const std::size_t s = active[bi], t = active[bj];
    const std::size_t id = n + step;
    size[id] = size[s] + size[t];
    tree.merges.push_back({s, t, best, size[id]});
    const double ns = static_cast<double>(size[s]), nt = static_cast<double>(size[t]);
    const double dst = best;
    for (std::size_t v : active) {
      if (v == s || v == t) continue;
      const double nv = static_cast<double>(size[v]);
      const double dvs = d(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(s));
      const double dvt = d(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(t));
      const double sq = ((nv + ns) * dvs * dvs + (nv + nt) * dvt * dvt - nv * dst * dst) / (nv + ns + nt);
      const double dn = std::sqrt(std::max(0.0, sq));
      d(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(id)) = dn;
      d(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(v)) = dn;
    }
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
    active.push_back(id);
  }
  return tree;
}

double max_cophenetic(const LinkageTree& tree) {
  if (tree.merges.empty()) throw InvalidInput("max_cophenetic: empty tree");
  double h = 0.0;
  for (const auto& m : tree.merges) h = std::max(h, m.height);
  return h;
}

namespace {

std::vector<std::vector<std::size_t>> members_by_id(const LinkageTree& tree) {
  std::vector<std::vector<std::size_t>> members(tree.leaves + tree.merges.size());
  for (std::size_t i = 0; i < tree.leaves; ++i) members[i] = {i};
  for (std::size_t k = 0; k < tree.merges.size(); ++k) {
    const auto& m = tree.merges[k];
    auto& out = members[tree.leaves + k];
    out = members[m.a];
    out.insert(out.end(), members[m.b].begin(), members[m.b].end());
  }
  return members;
}

}  // namespace

Eigen::MatrixXd cophenetic_matrix(const LinkageTree& tree) {
  const auto n = static_cast<Eigen::Index>(tree.leaves);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  const auto members = members_by_id(tree);
  for (const auto& m : tree.merges) {
    for (std::size_t i : members[m.a]) {
      for (std::size_t j : members[m.b]) {
        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.height;
        c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = m.height;
      }
    }
  }
  return c;
}

FlatClustering flat_clusters(const LinkageTree& tree, double t) {
  if (!(t >= 0.0)) throw InvalidInput("flat_clusters: threshold must be >= 0");
  std::vector<std::size_t> parent(tree.leaves);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const auto members = members_by_id(tree);
  for (const auto& m : tree.merges) {
    if (m.height > t) continue;
    const std::size_t ra = find(members[m.a].front());
    const std::size_t rb = find(members[m.b].front());
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  FlatClustering out;
  out.threshold = t;
  out.cluster_of.assign(tree.leaves, 0);
  std::vector<std::size_t> label_of_root(tree.leaves, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < tree.leaves; ++i) {
    const std::size_t r = find(i);
    if (label_of_root[r] == std::numeric_limits<std::size_t>::max()) label_of_root[r] = out.clusters++;
    out.cluster_of[i] = label_of_root[r];
  }
  return out;
}

double default_cut(const LinkageTree& tree, double cap) { return std::min(cap, max_cophenetic(tree) / 2.0); }

std::vector<std::size_t> select_representatives(const FlatClustering& clustering, const Eigen::MatrixXd& rho) {
  if (static_cast<std::size_t>(rho.rows()) != clustering.cluster_of.size()) {
    throw InvalidInput("select_representatives: correlation matrix size differs from the clustering");
  }
  std::vector<std::vector<std::size_t>> groups(clustering.clusters);
  for (std::size_t i = 0; i < clustering.cluster_of.size(); ++i) groups[clustering.cluster_of[i]].push_back(i);
  std::vector<std::size_t> reps;
  for (const auto& g : groups) {
    std::size_t best = g.front();
    double best_score = -1.0;
    for (std::size_t i : g) {
      double score = 0.0;
      for (std::size_t j : g) {
        if (j != i) score += std::abs(rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
      if (g.size() > 1) score /= static_cast<double>(g.size() - 1);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    reps.push_back(best);
  }
  std::sort(reps.begin(), reps.end());
  return reps;
}

double cluster_label_agreement(std::span<const int> assignment, std::span<const int> labels) {
  if (assignment.size() != labels.size() || labels.empty()) {
    throw InvalidInput("cluster_label_agreement: size mismatch or empty input");
  }
  std::size_t direct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int mapped = assignment[i] == 0 ? 1 : -1;
    if (mapped == labels[i]) ++direct;
  }
  const std::size_t best = std::max(direct, labels.size() - direct);
  return static_cast<double>(best) / static_cast<double>(labels.size());
}

KMeansResult kmeans2(const Eigen::MatrixXd& x, std::uint64_t seed, std::span<const int> labels,
                     std::size_t max_iterations) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < 2) throw InvalidInput("kmeans2: needs at least two rows");
  if (x.cols() < 1) throw InvalidInput("kmeans2: needs at least one feature");
  if (!labels.empty() && labels.size() != n) throw InvalidInput("kmeans2: label count differs from row count");

  Rng rng(derive_seed(seed, "kmeans2"));
  const std::size_t first = rng.below(n);
  std::size_t second = rng.below(n - 1);
  if (second >= first) ++second;

  KMeansResult r;
  r.centroids.resize(2, x.cols());
  r.centroids.row(0) = x.row(static_cast<Eigen::Index>(first));
  r.centroids.row(1) = x.row(static_cast<Eigen::Index>(second));
  r.assignment.assign(n, -1);

  auto dist2 = [&](std::size_t i, int c) {
    return (x.row(static_cast<Eigen::Index>(i)) - r.centroids.row(c)).squaredNorm();
  };
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = dist2(i, 1) < dist2(i, 0) ? 1 : 0;
      if (c != r.assignment[i]) {
        r.assignment[i] = c;
        changed = true;
      }
    }
    r.iterations = iter + 1;
    if (!changed && iter > 0) break;

    std::array<std::size_t, 2> counts{};
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(2, x.cols());
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[static_cast<std::size_t>(r.assignment[i])];
      sums.row(r.assignment[i]) += x.row(static_cast<Eigen::Index>(i));
    }
    for (int c = 0; c < 2; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        r.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: restart it at the point farthest from its own centroid.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = dist2(i, r.assignment[i]);
        if (v > far_d) {
          far_d = v;
          far = i;
        }
      }
      r.centroids.row(c) = x.row(static_cast<Eigen::Index>(far));
      ++r.reseeds;
    }
    if (!changed) break;
  }
  if (!labels.empty()) r.agreement = cluster_label_agreement(r.assignment, labels);
  return r;
}

CVReport kmeans_cross_validate(const FeatureMatrix& m, const std::vector<std::vector<std::size_t>>& folds,
                               const CVOptions& opts) {
  m.validate();
  const auto labels = to_int_labels(m.labels);
  std::vector<int> fold_of(m.rows(), -1);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t i : folds[f]) fold_of.at(i) = static_cast<int>(f);
  }
  CVReport report;
  report.seed = opts.seed;
  report.alpha = opts.alpha;
  report.k = folds.size();
  report.feature_set = opts.feature_set;
  report.scaling = opts.scaling;
  report.columns = m.columns;
  Eigen::MatrixXd x = m.values;
  if (opts.scaling == Scaling::global) x = fit_scaler(m.columns, x, true).apply(x);

  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<Eigen::Index> train_rows;
    std::vector<int> train_labels;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (fold_of[i] != static_cast<int>(f)) {
        train_rows.push_back(static_cast<Eigen::Index>(i));
        train_labels.push_back(labels[i]);
      }
    }
    Eigen::MatrixXd x_train = x(train_rows, Eigen::all);
    Eigen::MatrixXd x_valid = x(std::vector<Eigen::Index>(folds[f].begin(), folds[f].end()), Eigen::all);
    if (opts.scaling == Scaling::fold_safe) {
      const ScalerParams scaler = fit_scaler(m.columns, x_train, true);
      x_train = scaler.apply(x_train);
      x_valid = scaler.apply(x_valid);
    }
    const KMeansResult km = kmeans2(x_train, derive_seed(opts.seed, static_cast<std::uint64_t>(f)), train_labels);
    std::size_t direct = 0;
    for (std::size_t i = 0; i < train_labels.size(); ++i) {
      if ((km.assignment[i] == 0 ? 1 : -1) == train_labels[i]) ++direct;
    }
    const int label_of_zero = 2 * direct >= train_labels.size() ? 1 : -1;
    std::vector<int> y_valid, y_pred;
    for (Eigen::Index r = 0; r < x_valid.rows(); ++r) {
      const double d0 = (x_valid.row(r) - km.centroids.row(0)).squaredNorm();
      const double d1 = (x_valid.row(r) - km.centroids.row(1)).squaredNorm();
      const int cluster = d1 < d0 ? 1 : 0;
      y_pred.push_back(cluster == 0 ? label_of_zero : -label_of_zero);
      y_valid.push_back(labels[folds[f][static_cast<std::size_t>(r)]]);
    }
    FoldMetrics metrics = evaluate_metrics(y_valid, y_pred);
    metrics.fold = f;
    report.folds.push_back(std::move(metrics));
  }
  summarize_folds(report);
  return report;
}

std::vector<ComparisonTest> compare_cv_reports(const CVReport& a, const CVReport& b) {
  if (a.folds.size() != b.folds.size()) throw InvalidInput("compare_cv_reports: fold counts differ");
  std::vector<ComparisonTest> out;
  const std::array<std::pair<const char*, double FoldMetrics::*>, 3> metrics = {
      {{"balanced_accuracy", &FoldMetrics::balanced_accuracy},
       {"weighted_precision", &FoldMetrics::weighted_precision},
       {"weighted_recall", &FoldMetrics::weighted_recall}}};
  for (const auto& [name, field] : metrics) {
    std::vector<double> xa, xb;
    for (std::size_t f = 0; f < a.folds.size(); ++f) {
      xa.push_back(a.folds[f].*field);
      xb.push_back(b.folds[f].*field);
    }
    ComparisonTest test;
    test.metric = name;
    try {
      test.result = stats::paired_t(xa, xb);
    } catch (const DegenerateError& e) {
      test.note = e.what();
    }
    out.push_back(std::move(test));
  }
  return out;
}

FeatureAnalysis run_feature_analysis(const FeatureMatrix& m, const CVReport& full,
                                     const std::vector<std::vector<std::size_t>>& folds,
                                     const FeatureAnalysisOptions& opts) {
  m.validate();
  if (m.cols() < 2) throw InvalidInput("feature analysis needs at least two feature columns");
  FeatureAnalysis fa;
  fa.columns = m.columns;
  fa.rho = spearman_matrix(m.values);
  fa.tree = ward_linkage(correlation_to_distance(fa.rho, opts.distance));
  fa.cut = opts.cut ? *opts.cut : default_cut(fa.tree, opts.cut_cap);
  fa.clustering = flat_clusters(fa.tree, fa.cut);
  fa.clustering.representatives = select_representatives(fa.clustering, fa.rho);
  for (std::size_t j : fa.clustering.representatives) fa.selected.push_back(m.columns[j]);

  const FeatureMatrix reduced = select_features(m, fa.selected);
  CVOptions cv = opts.cv;
  cv.feature_set = opts.cv.feature_set + "/reduced@" + format_double(fa.cut);
  fa.reduced = cross_validate(reduced, folds, cv);
  fa.comparisons = compare_cv_reports(full, fa.reduced);

  if (opts.run_kmeans) {
    Eigen::MatrixXd x = fit_scaler(reduced.columns, reduced.values, true).apply(reduced.values);
    fa.kmeans = kmeans2(x, opts.cv.seed, to_int_labels(reduced.labels));
    CVOptions kcv = cv;
    kcv.feature_set = opts.cv.feature_set + "/kmeans@" + format_double(fa.cut);
    fa.kmeans_cv = kmeans_cross_validate(reduced, folds, kcv);
  }
  return fa;
}

namespace {

nlohmann::json test_to_json(const stats::TestResult& r) {
  nlohmann::json j;
  j["test"] = r.test;
  j["statistic"] = r.statistic;
  j["df1"] = r.df1;
  if (r.df2) j["df2"] = *r.df2;
  j["p"] = r.p;
  j["stars"] = stats::stars(r.p);
  return j;
}

}  // namespace

nlohmann::json FeatureAnalysis::to_json() const {
  nlohmann::json j;
  j["cut"] = cut;
  j["max_cophenetic"] = max_cophenetic(tree);
  j["clusters"] = clustering.clusters;
  j["selected"] = selected;
  nlohmann::json assignment = nlohmann::json::object();
  for (std::size_t i = 0; i < columns.size(); ++i) assignment[columns[i]] = clustering.cluster_of[i];
  j["cluster_of"] = std::move(assignment);
  j["dendrogram"] = linkage_to_json(tree, columns);
  j["newick"] = to_newick(tree, columns);
  j["reduced_cv"] = reduced.to_json();
  j["comparisons"] = nlohmann::json::array();
  for (const auto& c : comparisons) {
    nlohmann::json cj;
    cj["metric"] = c.metric;
    if (c.result) cj["result"] = test_to_json(*c.result);
    if (!c.note.empty()) cj["note"] = c.note;
    j["comparisons"].push_back(std::move(cj));
  }
  if (kmeans) {
    j["kmeans"] = {{"iterations", kmeans->iterations},
                   {"reseeds", kmeans->reseeds},
                   {"agreement", kmeans->agreement ? nlohmann::json(*kmeans->agreement) : nlohmann::json()}};
  }
  if (kmeans_cv) j["kmeans_cv"] = kmeans_cv->to_json();
  return j;
}

std::string to_newick(const LinkageTree& tree, const std::vector<std::string>& names) {
  if (names.size() != tree.leaves) throw InvalidInput("to_newick: name count differs from leaf count");
  std::vector<std::string> text(tree.leaves + tree.merges.size());
  std::vector<double> height(text.size(), 0.0);
  for (std::size_t i = 0; i < tree.leaves; ++i) text[i] = names[i];
  for (std::size_t k = 0; k < tree.merges.size(); ++k) {
    const auto& m = tree.merges[k];
    const std::size_t id = tree.leaves + k;
    height[id] = m.height;
    text[id] = "(" + text[m.a] + ":" + format_double(m.height - height[m.a]) + "," + text[m.b] + ":" +
               format_double(m.height - height[m.b]) + ")";
  }
  return (tree.merges.empty() ? text[0] : text.back()) + ";";
}

nlohmann::json linkage_to_json(const LinkageTree& tree, const std::vector<std::string>& names) {
  nlohmann::json j;
  j["leaves"] = names;
  j["merges"] = nlohmann::json::array();
  for (const auto& m : tree.merges) {
    j["merges"].push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
  }
  return j;
}

}  // namespace psyling

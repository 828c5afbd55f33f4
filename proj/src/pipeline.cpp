#include "psyling/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "psyling/corpus.hpp"
#include "psyling/lexicon.hpp"

namespace psyling {

namespace fs = std::filesystem;

namespace {

nlohmann::json test_json(const stats::TestResult& r) {
  nlohmann::json j;
  j["test"] = r.test;
  j["statistic"] = r.statistic;
  j["df1"] = r.df1;
  if (r.df2) j["df2"] = *r.df2;
  j["p"] = r.p;
  j["stars"] = stats::stars(r.p);
  return j;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(variance_threshold >= 0.0)) throw ValidationError("variance threshold must be >= 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be >= 0");
  if (k < 2) throw ValidationError("k must be >= 2");
  if (cut && !(*cut >= 0.0)) throw ValidationError("cut threshold must be >= 0");
  if (!(cut_cap > 0.0)) throw ValidationError("cut cap must be > 0");
  for (double c : extra_cuts) {
    if (!(c >= 0.0)) throw ValidationError("cut thresholds must be >= 0");
  }
  if (presets.empty()) throw ValidationError("at least one analysis preset is required");
  for (const auto& path : corpus_paths) {
    if (!fs::exists(path)) throw ValidationError("corpus file not found: " + path);
  }
  for (const std::string* path : {&lexicon_path, &weights_path, &norms_path, &external_matrix, &matrix_path}) {
    if (!path->empty() && !fs::exists(*path)) throw ValidationError("file not found: " + *path);
  }
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  j["corpus_paths"] = corpus_paths;
  j["lexicon_path"] = lexicon_path;
  j["weights_path"] = weights_path;
  j["norms_path"] = norms_path;
  j["external_matrix"] = external_matrix;
  j["matrix_path"] = matrix_path;
  j["granularity"] = std::string(to_string(granularity));
  j["variance_threshold"] = variance_threshold;
  j["alpha"] = alpha;
  j["k"] = k;
  j["seed"] = seed;
  j["cut"] = cut ? nlohmann::json(*cut) : nlohmann::json();
  j["cut_cap"] = cut_cap;
  j["extra_cuts"] = extra_cuts;
  std::vector<std::string> p;
  for (auto preset : presets) p.emplace_back(to_string(preset));
  j["presets"] = p;
  j["scaling"] = paper_faithful ? "global" : "fold_safe";
  j["shuffle_labels"] = shuffle_labels;
  j["kmeans"] = kmeans;
  j["distance"] = std::string(to_string(distance));
  j["levene_center"] = levene_center == stats::LeveneCenter::mean ? "mean" : "median";
  j["stats_features"] = stats_features;
  return j;
}

ExtractionOutput extract_matrix(const PipelineConfig& config) {
  config.validate();
  ExtractionOutput out;
  if (!config.external_matrix.empty()) {
    out.matrix = ingest_external_matrix(config.external_matrix, config.label_column, config.id_column);
    out.report["source"] = "ingested";
    out.report["external_matrix"] = {{"path", config.external_matrix},
                                     {"fingerprint", file_fingerprint(config.external_matrix)}};
    nlohmann::json imputed = nlohmann::json::object();
    for (std::size_t j = 0; j < out.matrix.cols(); ++j) {
      if (out.matrix.imputed_counts[j]) imputed[out.matrix.columns[j]] = out.matrix.imputed_counts[j];
    }
    out.report["imputed"] = imputed;
    return out;
  }
  if (config.corpus_paths.empty()) throw ValidationError("no corpus given");

  std::vector<LabeledDocument> docs;
  std::set<std::string> ids;
  nlohmann::json corpora = nlohmann::json::array();
  for (const auto& path : config.corpus_paths) {
    for (auto& d : load_corpus(path, corpus_format_from_path(path))) {
      if (!ids.insert(d.id).second) throw ValidationError("duplicate document id '" + d.id + "' across corpus files");
      docs.push_back(std::move(d));
    }
    corpora.push_back({{"path", path}, {"fingerprint", file_fingerprint(path)}});
  }

  const std::string data_dir = resolve_data_dir(config.data_dir);
  const LanguageResources res = load_resources(data_dir, config.lexicon_path);
  ExtractionContext ctx;
  ctx.resources = &res;
  ctx.seed = config.seed;
  const std::string weights_path =
      config.weights_path.empty() ? (fs::path(data_dir) / "config" / "easability_weights.json").string()
                                  : config.weights_path;
  std::string weights_fingerprint = "builtin";
  if (fs::exists(weights_path)) {
    ctx.weights = EasabilityWeights::load(weights_path);
    weights_fingerprint = file_fingerprint(weights_path);
  }
  std::optional<ReferenceStats> norms;
  if (!config.norms_path.empty()) norms = ReferenceStats::load(config.norms_path);

  const auto units = build_units(docs, res, config.granularity);
  const CorpusFeatures features = extract_corpus(units, ctx, norms, std::max(1u, config.threads));
  out.matrix = assemble_matrix(features.vectors);

  nlohmann::json& r = out.report;
  r["source"] = "computed";
  r["corpora"] = corpora;
  r["documents"] = docs.size();
  r["units"] = units.size();
  r["granularity"] = std::string(to_string(config.granularity));
  r["resources"] = res.provenance;
  r["easability_weights"] = {{"version", ctx.weights.version}, {"fingerprint", weights_fingerprint}};
  r["reference"] = {{"source", features.reference.source}, {"degenerate", features.reference.degenerate}};
  nlohmann::json flags = nlohmann::json::array();
  for (const auto& v : features.vectors) {
    for (const auto& f : v.flags) {
      flags.push_back({{"unit", v.unit_id}, {"feature", std::string(to_string(f.id))}, {"imputed", f.imputed},
                       {"note", f.note}});
    }
  }
  r["flags"] = flags;
  nlohmann::json imputed = nlohmann::json::object();
  for (std::size_t j = 0; j < out.matrix.cols(); ++j) {
    if (out.matrix.imputed_counts[j]) imputed[out.matrix.columns[j]] = out.matrix.imputed_counts[j];
  }
  r["imputed"] = imputed;
  return out;
}

ExtractionOutput load_analysis_input(const PipelineConfig& config) {
  if (!config.matrix_path.empty()) {
    config.validate();
    ExtractionOutput out;
    out.matrix = read_matrix_csv(config.matrix_path);
    out.report["source"] = "matrix";
    out.report["matrix"] = {{"path", config.matrix_path}, {"fingerprint", file_fingerprint(config.matrix_path)}};
    return out;
  }
  return extract_matrix(config);
}

// ---------------------------------------------------------------------------
// Statistics table

std::vector<StatsRow> stats_table(const FeatureMatrix& m, const std::vector<std::string>& features,
                                  stats::LeveneCenter center) {
  m.validate();
  std::vector<StatsRow> rows;
  for (const auto& name : features) {
    const std::size_t j = m.column_index(name);
    std::vector<double> human, llm;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double v = m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      (m.labels[i] == SourceLabel::human ? human : llm).push_back(v);
    }
    StatsRow row;
    row.feature = name;
    row.n_human = human.size();
    row.n_llm = llm.size();
    if (!human.empty()) row.mean_human = stats::mean(human);
    if (!llm.empty()) row.mean_llm = stats::mean(llm);
    std::vector<std::string> notes;
    try {
      row.t = stats::welch_t(human, llm);
    } catch (const Error& e) {
      notes.emplace_back(e.what());
    }
    try {
      row.levene = stats::levene_f(human, llm, center);
    } catch (const Error& e) {
      notes.emplace_back(e.what());
    }
    row.note = join(notes, "; ");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_t_df(const stats::TestResult& t) {
  std::string df = fixed(t.df1, 1);
  if (ends_with(df, ".0")) df.resize(df.size() - 2);
  return fixed(t.statistic, 2) + " (" + df + ")";
}

std::string stats_table_csv(const std::vector<StatsRow>& rows) {
  std::string out =
      "feature,t_df,t,df,t_p,t_stars,levene_f,levene_df1,levene_df2,levene_p,levene_stars,"
      "n_human,n_llm,mean_human,mean_llm,note\n";
  for (const auto& r : rows) {
    std::vector<std::string> f;
    f.push_back(csv_escape(r.feature));
    if (r.t) {
      f.push_back(csv_escape(format_t_df(*r.t)));
      f.push_back(format_double(r.t->statistic));
      f.push_back(format_double(r.t->df1));
      f.push_back(format_double(r.t->p));
      f.push_back(stats::stars(r.t->p));
    } else {
      f.insert(f.end(), 5, "");
    }
    if (r.levene) {
      f.push_back(format_double(r.levene->statistic));
      f.push_back(format_double(r.levene->df1));
      f.push_back(format_double(*r.levene->df2));
      f.push_back(format_double(r.levene->p));
      f.push_back(stats::stars(r.levene->p));
    } else {
      f.insert(f.end(), 5, "");
    }
    f.push_back(std::to_string(r.n_human));
    f.push_back(std::to_string(r.n_llm));
    f.push_back(format_double(r.mean_human));
    f.push_back(format_double(r.mean_llm));
    f.push_back(csv_escape(r.note));
    out += join(f, ",") + "\n";
  }
  return out;
}

nlohmann::json stats_table_json(const std::vector<StatsRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["feature"] = r.feature;
    j["n_human"] = r.n_human;
    j["n_llm"] = r.n_llm;
    j["mean_human"] = r.mean_human;
    j["mean_llm"] = r.mean_llm;
    j["welch_t"] = r.t ? test_json(*r.t) : nlohmann::json();
    j["t_df"] = r.t ? nlohmann::json(format_t_df(*r.t)) : nlohmann::json();
    j["levene"] = r.levene ? test_json(*r.levene) : nlohmann::json();
    if (!r.note.empty()) j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Histograms

namespace {

double quantile7(std::vector<double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Histogram histogram(const FeatureMatrix& m, const std::string& feature) {
  const std::size_t j = m.column_index(feature);
  std::vector<double> values;
  for (std::size_t i = 0; i < m.rows(); ++i) values.push_back(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  if (values.empty()) throw InvalidInput("histogram of an empty column");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front(), hi = sorted.back();
  const double n = static_cast<double>(sorted.size());
  std::size_t bins = 1;
  if (hi > lo) {
    const double iqr = quantile7(sorted, 0.75) - quantile7(sorted, 0.25);
    const double width = 2.0 * iqr / std::cbrt(n);
    if (width > 0.0) {
      bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    } else {
      bins = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
    }
    bins = std::clamp<std::size_t>(bins, 1, 1000);
  }
  Histogram h;
  h.feature = feature;
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + span * static_cast<double>(b) / static_cast<double>(bins));
  h.edges.back() = hi > lo ? hi : lo + span;
  h.human.assign(bins, 0);
  h.llm.assign(bins, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto b = static_cast<std::size_t>((values[i] - lo) / span * static_cast<double>(bins));
    b = std::min(b, bins - 1);
    ++(m.labels[i] == SourceLabel::human ? h.human : h.llm)[b];
  }
  return h;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lower,bin_upper,human,llm\n";
  for (std::size_t b = 0; b < h.human.size(); ++b) {
    out += format_double(h.edges[b]) + "," + format_double(h.edges[b + 1]) + "," + std::to_string(h.human[b]) + "," +
           std::to_string(h.llm[b]) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analysis

namespace {

nlohmann::json class_counts(const FeatureMatrix& m) {
  std::size_t human = 0;
  for (auto l : m.labels) human += l == SourceLabel::human;
  return {{"human", human}, {"llm", m.rows() - human}};
}

std::vector<double> fold_metric(const CVReport& r, double FoldMetrics::*field) {
  std::vector<double> out;
  for (const auto& f : r.folds) out.push_back(f.*field);
  return out;
}

}  // namespace

AnalysisOutput run_analysis(const PipelineConfig& config, const ExtractionOutput& input) {
  config.validate();
  FeatureMatrix m = input.matrix;
  m.validate();
  AnalysisOutput out;
  nlohmann::json& r = out.report;
  r["schema_version"] = kReportSchemaVersion;
  r["tool"] = {{"name", "psyling"}, {"version", std::string(kToolVersion)}};
  r["config"] = config.to_json();
  r["input"] = input.report;
  r["input"]["rows"] = m.rows();
  r["input"]["columns"] = m.cols();
  r["input"]["class_counts"] = class_counts(m);
  r["input"]["matrix_fingerprint"] = hex64(fnv1a64(matrix_to_csv(m)));

  if (config.shuffle_labels) {
    Rng rng(derive_seed(config.seed, "shuffle-labels"));
    rng.shuffle(std::span<SourceLabel>(m.labels));
  }
  r["labels_shuffled"] = config.shuffle_labels;

  const VarianceFilterResult filtered = variance_filter(m, config.variance_threshold);
  nlohmann::json dropped = nlohmann::json::array();
  for (std::size_t i = 0; i < filtered.dropped.size(); ++i) {
    dropped.push_back({{"feature", filtered.dropped[i]}, {"variance", filtered.dropped_variances[i]}});
  }
  r["variance_filter"] = {{"threshold", config.variance_threshold},
                          {"dropped", dropped},
                          {"retained", filtered.matrix.cols()},
                          {"retained_columns", filtered.matrix.columns}};

  const auto labels = to_int_labels(m.labels);
  const auto folds = stratified_folds(labels, config.k, config.seed);
  nlohmann::json fold_sizes = nlohmann::json::array();
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::size_t human = 0;
    for (std::size_t i : folds[f]) human += labels[i] == 1;
    fold_sizes.push_back({{"fold", f}, {"human", human}, {"llm", folds[f].size() - human}});
  }
  r["folds"] = {{"k", config.k}, {"seed", config.seed}, {"sizes", fold_sizes}};

  CVOptions cv;
  cv.k = config.k;
  cv.alpha = config.alpha;
  cv.seed = config.seed;
  cv.scaling = config.paper_faithful ? Scaling::global : Scaling::fold_safe;
  cv.threads = std::max(1u, config.threads);

  std::vector<double> cuts;
  cuts.push_back(-1.0);  // default cut
  for (double c : config.extra_cuts) cuts.push_back(c);

  std::vector<CVReport> preset_reports;
  std::vector<std::string> preset_names;
  r["analyses"] = nlohmann::json::array();
  for (DropPreset preset : config.presets) {
    const std::set<std::string> wanted = preset_columns(preset);
    std::set<std::string> present;
    std::vector<std::string> absent;
    for (const auto& c : wanted) {
      if (filtered.matrix.has_column(c)) {
        present.insert(c);
      } else {
        absent.push_back(c);
      }
    }
    const FeatureMatrix pm = drop_features(filtered.matrix, present);
    nlohmann::json a;
    a["preset"] = std::string(to_string(preset));
    a["dropped"] = std::vector<std::string>(present.begin(), present.end());
    a["absent"] = absent;
    a["columns"] = pm.columns;
    cv.feature_set = std::string(to_string(preset));
    const CVReport full = cross_validate(pm, folds, cv);
    a["full_cv"] = full.to_json();
    a["feature_analyses"] = nlohmann::json::array();
    if (pm.cols() >= 2) {
      for (double c : cuts) {
        FeatureAnalysisOptions fo;
        if (c >= 0.0) fo.cut = c;
        fo.cut_cap = config.cut_cap;
        fo.distance = config.distance;
        fo.cv = cv;
        fo.run_kmeans = config.kmeans;
        const FeatureAnalysis fa = run_feature_analysis(pm, full, folds, fo);
        nlohmann::json fj = fa.to_json();
        fj["cut_source"] = c >= 0.0 ? "explicit" : "default";
        a["feature_analyses"].push_back(std::move(fj));
      }
    } else {
      a["feature_analysis_note"] = "fewer than two columns; feature analysis skipped";
    }
    r["analyses"].push_back(std::move(a));
    preset_reports.push_back(full);
    preset_names.emplace_back(to_string(preset));
  }

  if (preset_reports.size() >= 2) {
    nlohmann::json comparison;
    comparison["presets"] = preset_names;
    comparison["rm_anova"] = nlohmann::json::array();
    const std::array<std::pair<const char*, double FoldMetrics::*>, 3> metrics = {
        {{"balanced_accuracy", &FoldMetrics::balanced_accuracy},
         {"weighted_precision", &FoldMetrics::weighted_precision},
         {"weighted_recall", &FoldMetrics::weighted_recall}}};
    for (const auto& [name, field] : metrics) {
      std::vector<std::vector<double>> groups;
      for (const auto& rep : preset_reports) groups.push_back(fold_metric(rep, field));
      nlohmann::json t;
      t["metric"] = name;
      try {
        t["result"] = test_json(stats::rm_anova(groups));
      } catch (const DegenerateError& e) {
        t["note"] = e.what();
      }
      comparison["rm_anova"].push_back(std::move(t));
    }
    r["preset_comparison"] = std::move(comparison);
  }

  const std::vector<std::string> stat_features =
      config.stats_features.empty() ? filtered.matrix.columns : config.stats_features;
  out.stats = stats_table(config.stats_features.empty() ? filtered.matrix : m, stat_features, config.levene_center);
  r["stats_table"] = stats_table_json(out.stats);
  for (const auto& f : filtered.matrix.columns) out.histograms.push_back(histogram(filtered.matrix, f));
  return out;
}

// ---------------------------------------------------------------------------
// Markdown

namespace {

std::string pm(const nlohmann::json& cv, const char* metric) {
  return fixed(cv["mean"][metric].get<double>(), 2) + " ± " + fixed(cv["sd"][metric].get<double>(), 2);
}

std::string cv_row(const std::string& name, const nlohmann::json& cv) {
  return "| " + name + " | " + std::to_string(cv["columns"].size()) + " | " + pm(cv, "ba") + " | " + pm(cv, "wp") +
         " | " + pm(cv, "wr") + " |\n";
}

std::string test_text(const nlohmann::json& t) {
  std::string s = "t = " + fixed(t["statistic"].get<double>(), 2) + ", df = " + format_double(t["df1"].get<double>());
  if (t.contains("df2")) s = "F = " + fixed(t["statistic"].get<double>(), 2) + ", df = (" +
                             format_double(t["df1"].get<double>()) + ", " + format_double(t["df2"].get<double>()) + ")";
  return s + ", p = " + fixed(t["p"].get<double>(), 4) + t["stars"].get<std::string>();
}

}  // namespace

std::string render_markdown(const nlohmann::json& report) {
  std::string md = "# Analysis report\n\n";
  const auto& input = report["input"];
  md += "Rows: " + std::to_string(input["rows"].get<std::size_t>()) + " (human " +
        std::to_string(input["class_counts"]["human"].get<std::size_t>()) + ", llm " +
        std::to_string(input["class_counts"]["llm"].get<std::size_t>()) + "). Columns: " +
        std::to_string(input["columns"].get<std::size_t>()) + ".\n\n";
  if (report["labels_shuffled"].get<bool>()) md += "**Labels shuffled (control run).**\n\n";
  const auto& vf = report["variance_filter"];
  md += "Variance filter (< " + format_double(vf["threshold"].get<double>()) + "): removed " +
        std::to_string(vf["dropped"].size()) + ", retained " + std::to_string(vf["retained"].get<std::size_t>()) +
        ".\n\n";

  for (const auto& a : report["analyses"]) {
    md += "## Preset " + a["preset"].get<std::string>() + "\n\n";
    if (!a["dropped"].empty()) {
      std::vector<std::string> d = a["dropped"].get<std::vector<std::string>>();
      md += "Removed: " + join(d, ", ") + ".\n\n";
    }
    if (!a["absent"].empty()) {
      std::vector<std::string> d = a["absent"].get<std::vector<std::string>>();
      md += "Not present (already filtered): " + join(d, ", ") + ".\n\n";
    }
    md += "| Model | Features | Balanced accuracy | Weighted precision | Weighted recall |\n";
    md += "|---|---|---|---|---|\n";
    md += cv_row("Full", a["full_cv"]);
    for (const auto& fa : a["feature_analyses"]) {
      md += cv_row("Reduced (cut " + fixed(fa["cut"].get<double>(), 3) + ")", fa["reduced_cv"]);
      if (fa.contains("kmeans_cv")) md += cv_row("k-means (cut " + fixed(fa["cut"].get<double>(), 3) + ")", fa["kmeans_cv"]);
    }
    md += "\n";
    for (const auto& fa : a["feature_analyses"]) {
      std::vector<std::string> sel = fa["selected"].get<std::vector<std::string>>();
      md += "Cut " + fixed(fa["cut"].get<double>(), 3) + " (max cophenetic " +
            fixed(fa["max_cophenetic"].get<double>(), 3) + "): " + std::to_string(sel.size()) +
            " selected: " + join(sel, ", ") + ".\n\n";
      for (const auto& c : fa["comparisons"]) {
        md += "- Full vs reduced, " + c["metric"].get<std::string>() + ": ";
        md += c.contains("result") ? test_text(c["result"]) : c["note"].get<std::string>();
        md += "\n";
      }
      md += "\n";
    }
  }

  if (report.contains("preset_comparison")) {
    md += "## Preset comparison (repeated measures ANOVA)\n\n";
    for (const auto& t : report["preset_comparison"]["rm_anova"]) {
      md += "- " + t["metric"].get<std::string>() + ": ";
      md += t.contains("result") ? test_text(t["result"]) : t["note"].get<std::string>();
      md += "\n";
    }
    md += "\n";
  }

  md += "## Group differences\n\n| Feature | t (df) | Levene's F |\n|---|---|---|\n";
  for (const auto& row : report["stats_table"]) {
    std::string t = row["t_df"].is_null() ? "n/a" : row["t_df"].get<std::string>() +
                                                        row["welch_t"]["stars"].get<std::string>();
    std::string f = row["levene"].is_null() ? "n/a" : fixed(row["levene"]["statistic"].get<double>(), 2) +
                                                          row["levene"]["stars"].get<std::string>();
    md += "| " + row["feature"].get<std::string>() + " | " + t + " | " + f + " |\n";
  }
  md += "\n\\* p < 0.05, \\*\\* p < 0.01.\n";
  return md;
}

void write_analysis_bundle(const AnalysisOutput& out, const std::string& directory) {
  const fs::path dir(directory);
  fs::create_directories(dir / "histograms");
  write_text(dir / "report.json", out.report.dump(2) + "\n");
  write_text(dir / "report.md", render_markdown(out.report));
  write_text(dir / "stats.csv", stats_table_csv(out.stats));
  for (const auto& h : out.histograms) write_text(dir / "histograms" / (h.feature + ".csv"), histogram_csv(h));
}

std::string folds_csv(const FeatureMatrix& m, const std::vector<std::vector<std::size_t>>& folds) {
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t i : folds[f]) rows.emplace_back(i, f);
  }
  std::sort(rows.begin(), rows.end());
  std::string out = "index,id,label,fold\n";
  for (const auto& [i, f] : rows) {
    out += std::to_string(i) + "," + csv_escape(m.row_ids[i]) + "," + std::string(to_string(m.labels[i])) + "," +
           std::to_string(f) + "\n";
  }
  return out;
}

}  // namespace psyling

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psyling/classify.hpp"
#include "psyling/featsel.hpp"
#include "psyling/features.hpp"
#include "psyling/matrix.hpp"
#include "psyling/stats.hpp"

namespace psyling {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

struct PipelineConfig {
  std::vector<std::string> corpus_paths;
  std::string data_dir;        // empty: resolve_data_dir()
  std::string lexicon_path;    // empty: <data_dir>/lexicon/core_lexicon.csv
  std::string weights_path;    // empty: <data_dir>/config/easability_weights.json
  std::string norms_path;      // empty: reference statistics from the corpus itself
  std::string external_matrix; // precomputed table to ingest instead of extracting
  std::string matrix_path;     // matrix CSV written by `extract`
  std::string label_column = "label";
  std::string id_column = "id";
  Granularity granularity = Granularity::sentence;
  double variance_threshold = 0.01;
  double alpha = 1.0;
  std::size_t k = 10;
  std::uint64_t seed = 42;
  std::optional<double> cut;
  double cut_cap = 1.25;
  std::vector<double> extra_cuts;
  std::vector<DropPreset> presets = {DropPreset::a1};
  bool paper_faithful = false;
  bool shuffle_labels = false;
  bool kmeans = true;
  DistanceKind distance = DistanceKind::absolute;
  stats::LeveneCenter levene_center = stats::LeveneCenter::mean;
  std::vector<std::string> stats_features;  // empty: every retained column
  unsigned threads = 1;

  /// Throws ValidationError for out-of-range values or missing inputs.
  void validate() const;
  nlohmann::json to_json() const;
};

struct ExtractionOutput {
  FeatureMatrix matrix;
  nlohmann::json report;  // flags, reference statistics, resource provenance
};

/// Builds the feature matrix from the configured corpus, or ingests the
/// external table when one is configured.
ExtractionOutput extract_matrix(const PipelineConfig& config);

/// The matrix an analysis starts from: matrix_path, else the external
/// table, else a fresh extraction.
ExtractionOutput load_analysis_input(const PipelineConfig& config);

struct StatsRow {
  std::string feature;
  std::size_t n_human = 0;
  std::size_t n_llm = 0;
  double mean_human = 0.0;
  double mean_llm = 0.0;
  std::optional<stats::TestResult> t;  // Welch, human minus llm
  std::optional<stats::TestResult> levene;
  std::string note;
};

/// Per-feature Welch t and Levene F between the human and llm rows.
/// Unknown features throw ValidationError listing the valid ones.
std::vector<StatsRow> stats_table(const FeatureMatrix& m, const std::vector<std::string>& features,
                                  stats::LeveneCenter center = stats::LeveneCenter::mean);
/// Columns: feature,t_df,t,df,t_p,t_stars,levene_f,levene_df1,levene_df2,levene_p,levene_stars,
/// n_human,n_llm,mean_human,mean_llm,note
std::string stats_table_csv(const std::vector<StatsRow>& rows);
nlohmann::json stats_table_json(const std::vector<StatsRow>& rows);
/// "8.36 (1084.9)" style display of a t statistic with its df.
std::string format_t_df(const stats::TestResult& t);

struct Histogram {
  std::string feature;
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> human;
  std::vector<std::size_t> llm;
};

/// Freedman-Diaconis bins over the pooled column, counts per label. Falls
/// back to Sturges' rule when the interquartile range is zero and to one
/// bin for a constant column.
Histogram histogram(const FeatureMatrix& m, const std::string& feature);
std::string histogram_csv(const Histogram& h);

struct AnalysisOutput {
  nlohmann::json report;
  std::vector<StatsRow> stats;
  std::vector<Histogram> histograms;
};

/// Variance filter, presets, full-model CV, feature analysis per cut,
/// comparison tests, statistics table and histograms.
AnalysisOutput run_analysis(const PipelineConfig& config, const ExtractionOutput& input);

/// Markdown tables rendered from the JSON report alone.
std::string render_markdown(const nlohmann::json& report);

/// Writes report.json, report.md, stats.csv and histograms/<feature>.csv.
void write_analysis_bundle(const AnalysisOutput& out, const std::string& directory);

/// Fold assignment listing: index,id,label,fold.
std::string folds_csv(const FeatureMatrix& m, const std::vector<std::vector<std::size_t>>& folds);

}  // namespace psyling

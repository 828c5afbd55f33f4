#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psyling/classify.hpp"
#include "psyling/corpus.hpp"
#include "psyling/features.hpp"
#include "psyling/lexicon.hpp"
#include "psyling/pipeline.hpp"

namespace {

using namespace psyling;

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kBadInput = 3, kDegenerate = 4 };

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

struct Inputs {
  std::vector<std::string> corpus;
  std::string data_dir, lexicon, weights, norms, external, matrix;
  std::string label_column = "label", id_column = "id", granularity = "sentence";
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

void add_input_options(CLI::App* cmd, Inputs& in, bool allow_matrix) {
  cmd->add_option("-c,--corpus", in.corpus, "Corpus file(s), JSONL or CSV with id,source_label,topic,text");
  cmd->add_option("--data-dir", in.data_dir, "Language resource directory (default: $PSYLING_DATA_DIR or built-in)");
  cmd->add_option("--lexicon", in.lexicon, "Lexicon CSV replacing the default one");
  cmd->add_option("--weights", in.weights, "Easability weights JSON");
  cmd->add_option("--norms", in.norms, "Reference norms CSV (feature,mean,sd) for easability z-scores");
  cmd->add_option("--external", in.external, "Precomputed feature table to ingest instead of extracting");
  cmd->add_option("--label-column", in.label_column, "Label column of the external table");
  cmd->add_option("--id-column", in.id_column, "Id column of the external table");
  cmd->add_option("--granularity", in.granularity, "Unit of analysis: sentence or document");
  cmd->add_option("--seed", in.seed, "Random seed");
  cmd->add_option("--threads", in.threads, "Worker threads for extraction and folds");
  if (allow_matrix) cmd->add_option("-m,--matrix", in.matrix, "Matrix CSV written by `extract`");
}

PipelineConfig base_config(const Inputs& in) {
  PipelineConfig c;
  c.corpus_paths = in.corpus;
  c.data_dir = in.data_dir;
  c.lexicon_path = in.lexicon;
  c.weights_path = in.weights;
  c.norms_path = in.norms;
  c.external_matrix = in.external;
  c.matrix_path = in.matrix;
  c.label_column = in.label_column;
  c.id_column = in.id_column;
  c.granularity = parse_granularity(in.granularity);
  c.seed = in.seed;
  c.threads = in.threads;
  return c;
}

void require_source(const PipelineConfig& c) {
  if (c.corpus_paths.empty() && c.external_matrix.empty() && c.matrix_path.empty()) {
    throw ValidationError("give --corpus, --external or --matrix");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Psycholinguistic feature extraction and ridge classification of human vs LLM text"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // extract
  Inputs ex_in;
  std::string ex_out = "matrix.csv", ex_flags;
  auto* extract = app.add_subcommand("extract", "Compute the feature matrix for a corpus");
  add_input_options(extract, ex_in, false);
  extract->add_option("-o,--output", ex_out, "Matrix CSV path");
  extract->add_option("--flags", ex_flags, "Extraction report JSON (default: <output>.flags.json)");

  // analyze
  Inputs an_in;
  std::string an_out = "report";
  std::vector<std::string> presets = {"a1"};
  std::vector<double> cuts;
  double variance = 0.01, alpha = 1.0, cut_cap = 1.25;
  std::optional<double> cut;
  std::size_t k = 10;
  bool faithful = false, shuffle = false, no_kmeans = false;
  std::string distance = "abs", center = "mean";
  std::vector<std::string> an_features;
  auto* analyze = app.add_subcommand("analyze", "Run the classification and feature analyses");
  add_input_options(analyze, an_in, true);
  analyze->add_option("-o,--out-dir", an_out, "Output directory for report.json, report.md, stats.csv, histograms/");
  analyze->add_option("--preset", presets, "Analysis preset(s): a1 (all features), a2, a3")->delimiter(',');
  analyze->add_option("--variance-threshold", variance, "Drop columns with sample variance below this");
  analyze->add_option("--alpha", alpha, "Ridge penalty");
  analyze->add_option("-k,--folds", k, "Cross-validation folds");
  analyze->add_option("--cut", cut, "Dendrogram cut (default: min(cap, max cophenetic / 2))");
  analyze->add_option("--cut-cap", cut_cap, "Cap on the default cut");
  analyze->add_option("--extra-cut", cuts, "Additional cut threshold(s), e.g. 0.95")->delimiter(',');
  analyze->add_option("--distance", distance, "Correlation distance: abs (1-|rho|) or signed (1-rho)");
  analyze->add_option("--levene-center", center, "Levene center: mean or median");
  analyze->add_option("--stats-feature", an_features, "Restrict the statistics table to these features")
      ->delimiter(',');
  analyze->add_flag("--paper-faithful", faithful, "Scale once on the whole matrix before cross-validation");
  analyze->add_flag("--shuffle-labels", shuffle, "Permute labels (chance-level control)");
  analyze->add_flag("--no-kmeans", no_kmeans, "Skip the k-means diagnostic");

  // stats
  Inputs st_in;
  std::string st_out, st_center = "mean";
  std::vector<std::string> st_features;
  auto* stats_cmd = app.add_subcommand("stats", "Welch t and Levene F per feature between human and llm rows");
  add_input_options(stats_cmd, st_in, true);
  stats_cmd->add_option("-f,--feature", st_features, "Features (default: all columns)")->delimiter(',');
  stats_cmd->add_option("--levene-center", st_center, "Levene center: mean or median");
  stats_cmd->add_option("-o,--output", st_out, "CSV path (default: stdout)");

  // features
  bool feat_json = false;
  auto* features_cmd = app.add_subcommand("features", "List the feature catalog");
  features_cmd->add_flag("--json", feat_json, "Print JSON");

  // folds
  Inputs fo_in;
  std::size_t fo_k = 10;
  std::string fo_out;
  auto* folds_cmd = app.add_subcommand("folds", "Print stratified fold assignments");
  add_input_options(folds_cmd, fo_in, true);
  folds_cmd->add_option("-k,--folds", fo_k, "Number of folds");
  folds_cmd->add_option("-o,--output", fo_out, "CSV path (default: stdout)");

  // summary
  std::vector<std::string> su_corpus;
  std::string su_data;
  auto* summary_cmd = app.add_subcommand("summary", "Per-label document and sentence counts");
  summary_cmd->add_option("-c,--corpus", su_corpus, "Corpus file(s)")->required();
  summary_cmd->add_option("--data-dir", su_data, "Language resource directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*extract) {
      PipelineConfig c = base_config(ex_in);
      require_source(c);
      const ExtractionOutput out = extract_matrix(c);
      write_matrix_csv(out.matrix, ex_out);
      write_or_print(ex_flags.empty() ? ex_out + ".flags.json" : ex_flags, out.report.dump(2) + "\n");
      std::cerr << "wrote " << out.matrix.rows() << " x " << out.matrix.cols() << " matrix to " << ex_out << "\n";
    } else if (*analyze) {
      PipelineConfig c = base_config(an_in);
      require_source(c);
      c.presets.clear();
      for (const auto& p : presets) c.presets.push_back(parse_drop_preset(p));
      c.variance_threshold = variance;
      c.alpha = alpha;
      c.k = k;
      c.cut = cut;
      c.cut_cap = cut_cap;
      c.extra_cuts = cuts;
      c.distance = parse_distance_kind(distance);
      c.levene_center = center == "median" ? stats::LeveneCenter::median : stats::LeveneCenter::mean;
      c.stats_features = an_features;
      c.paper_faithful = faithful;
      c.shuffle_labels = shuffle;
      c.kmeans = !no_kmeans;
      const AnalysisOutput out = run_analysis(c, load_analysis_input(c));
      write_analysis_bundle(out, an_out);
      std::cout << render_markdown(out.report);
    } else if (*stats_cmd) {
      PipelineConfig c = base_config(st_in);
      require_source(c);
      const ExtractionOutput in = load_analysis_input(c);
      const auto features = st_features.empty() ? in.matrix.columns : st_features;
      const auto rows = stats_table(in.matrix, features,
                                    st_center == "median" ? stats::LeveneCenter::median : stats::LeveneCenter::mean);
      write_or_print(st_out, stats_table_csv(rows));
    } else if (*features_cmd) {
      if (feat_json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& f : feature_catalog()) {
          arr.push_back({{"id", std::string(f.name)}, {"description", std::string(f.description)}});
        }
        std::cout << arr.dump(2) << "\n";
      } else {
        for (const auto& f : feature_catalog()) std::cout << f.name << "\t" << f.description << "\n";
      }
    } else if (*folds_cmd) {
      PipelineConfig c = base_config(fo_in);
      require_source(c);
      const ExtractionOutput in = load_analysis_input(c);
      const auto folds = stratified_folds(to_int_labels(in.matrix.labels), fo_k, c.seed);
      write_or_print(fo_out, folds_csv(in.matrix, folds));
    } else if (*summary_cmd) {
      std::vector<LabeledDocument> docs;
      for (const auto& p : su_corpus) {
        auto part = load_corpus(p, corpus_format_from_path(p));
        docs.insert(docs.end(), part.begin(), part.end());
      }
      const auto rules = SegmentationRules::load(
          (std::filesystem::path(resolve_data_dir(su_data)) / "segmentation" / "abbreviations.txt").string());
      for (const auto& [label, s] : corpus_summary(docs, rules)) {
        std::printf("%s\tdocuments=%zu\tsentences=%zu\tsentences_per_doc=%.2f (sd %.2f)\twords_per_sentence=%.2f (sd %.2f)\n",
                    std::string(to_string(label)).c_str(), s.documents, s.sentences, s.sentences_per_document.mean,
                    s.sentences_per_document.sd, s.words_per_sentence.mean, s.words_per_sentence.sd);
      }
    }
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}

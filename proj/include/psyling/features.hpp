#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psyling/corpus.hpp"
#include "psyling/lexicon.hpp"

namespace psyling {

// Column order of the computed feature matrix. Do not reorder: the order is
// part of the matrix file format.
enum class FeatureId {
  WC_TOTAL,
  SL_MEAN,
  SL_SD,
  WL_SYL_MEAN,
  WL_SYL_SD,
  WL_LET_MEAN,
  WL_LET_SD,
  TTR_CONTENT_LEMMA,
  VOCD_D,
  NP_DENSITY,
  PASSIVE_INC,
  CONN_ALL_INC,
  PRP1S_INC,
  PRP2_INC,
  INTENTIONAL_VERB_INC,
  FREQ_CONTENT_LOG,
  AOA_CONTENT,
  CONCRETENESS_MEAN,
  NARRATIVITY_Z,
  NARRATIVITY_PCT,
  SYNTAX_SIMPLICITY_Z,
  SYNTAX_SIMPLICITY_PCT,
  CONCRETENESS_Z,
  CONCRETENESS_PCT,
  REF_COHESION_Z,
  REF_COHESION_PCT,
  DEEP_COHESION_Z,
  DEEP_COHESION_PCT,
  VERB_COHESION_Z,
  VERB_COHESION_PCT,
  CONNECTIVITY_Z,
  CONNECTIVITY_PCT,
  TEMPORALITY_Z,
  TEMPORALITY_PCT,
};

inline constexpr std::size_t kFeatureCount = 34;

struct FeatureInfo {
  FeatureId id;
  std::string_view name;
  std::string_view description;
};

const std::vector<FeatureInfo>& feature_catalog();
std::string_view to_string(FeatureId id);
FeatureId parse_feature_id(std::string_view name);
std::optional<FeatureId> find_feature_id(std::string_view name);

enum class Component {
  NARRATIVITY,
  SYNTAX_SIMPLICITY,
  CONCRETENESS,
  REF_COHESION,
  DEEP_COHESION,
  VERB_COHESION,
  CONNECTIVITY,
  TEMPORALITY
};

inline constexpr std::size_t kComponentCount = 8;
std::string_view to_string(Component c);
Component parse_component(std::string_view name);
FeatureId z_feature(Component c);
FeatureId pct_feature(Component c);

// ---------------------------------------------------------------------------
// Word-level operations

/// Occurrences per 1000 words.
double incidence(double count, std::size_t total_words);

/// Distinct content lemmas / content tokens. Throws InvalidInput without content tokens.
double ttr_content_lemmas(std::span<const Token> tokens);

struct VocdParams {
  int min_size = 35;
  int max_size = 50;
  int samples_per_size = 100;
  int runs = 3;
  double max_d = 200.0;  // reported when the TTR curve never falls (fit diverges)
};

struct VocdResult {
  double d = 0.0;
  bool capped = false;
  std::vector<double> run_d;  // one fit per run
};

/// Theoretical TTR of a random N-token sample for diversity D.
double vocd_curve(double n, double d);

/// Least-squares D for mean TTR values observed at sizes min_size..max_size.
/// Searches (0, max_d]; `capped` is set when the optimum sits on max_d.
std::pair<double, bool> fit_vocd_d(std::span<const double> mean_ttr, int min_size, double max_d);

/// D statistic. Depends only on the type-frequency profile of `words`, so it
/// is invariant to token order and relabeling for a fixed seed.
VocdResult vocd(std::span<const std::string> words, const VocdParams& params, std::uint64_t seed);

/// Noun phrases per 1000 words, chunking (determiner? adjective* noun+ | pronoun).
double np_density(std::span<const Token> tokens);
std::size_t count_noun_phrases(std::span<const Token> tokens);

/// Passive constructions per 1000 words: a be-form followed within two word
/// tokens by a past participle.
double passive_incidence(std::span<const Sentence> sentences, const LanguageResources& res);
std::size_t count_passives(const Sentence& sentence, const LanguageResources& res);

struct WordInfo {
  std::optional<double> frequency;
  std::optional<double> aoa;
  std::optional<double> concreteness;
  double frequency_coverage = 0.0;  // content tokens with a lexicon frequency / content tokens
  double aoa_coverage = 0.0;
  double concreteness_coverage = 0.0;
};

/// Means over content tokens. Frequency of a content word absent from the
/// lexicon counts as 0 (log scale floor); AoA and concreteness average only
/// over words that have a value. Statistics with zero coverage are empty.
WordInfo word_info_means(std::span<const Token> tokens, const Lexicon& lexicon);

// ---------------------------------------------------------------------------
// Units and base measures

/// A unit of analysis (one sentence or a whole document) with annotated tokens.
struct TextUnit {
  std::string id;
  SourceLabel label = SourceLabel::human;
  std::vector<Sentence> sentences;
};

enum class Granularity { sentence, document };
std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view text);

/// Segments and annotates documents into units. Sentence units are named
/// "<doc_id>#<index>".
std::vector<TextUnit> build_units(const std::vector<LabeledDocument>& docs, const LanguageResources& res,
                                  Granularity granularity);

/// Raw measurements of one unit keyed by name: the non-easability catalog
/// features plus the auxiliary inputs of the easability composites. Missing
/// values (e.g. no content words) are empty and carry a note.
struct BaseMeasures {
  std::map<std::string, std::optional<double>> values;
  std::map<std::string, std::string> notes;

  std::optional<double> get(const std::string& name) const;
};

/// Auxiliary measure names used only by the easability composites.
const std::vector<std::string>& auxiliary_measures();

BaseMeasures compute_base_measures(const TextUnit& unit, const LanguageResources& res, const VocdParams& vocd_params,
                                   std::uint64_t seed);

/// Mean and SD per base measure over a reference population.
struct ReferenceStats {
  struct Moments {
    double mean = 0.0;
    double sd = 1.0;
  };
  std::map<std::string, Moments> moments;
  /// Measures whose reference SD was zero or undefined and were given sd = 1.
  std::vector<std::string> degenerate;
  std::string source;  // "corpus" or the norms file path

  /// Norms CSV: feature,mean,sd.
  static ReferenceStats load(const std::string& path);
  static ReferenceStats parse(std::string_view csv_content, const std::string& source = "<memory>");
  /// Sample mean/SD over units where the measure is present.
  static ReferenceStats from_measures(std::span<const BaseMeasures> measures);
  std::string to_csv() const;
};

/// Fixed-weight composites: component z = sum_j w_j * (x_j - mean_j) / sd_j.
struct EasabilityWeights {
  std::string version;
  std::array<std::map<std::string, double>, kComponentCount> weights;

  static EasabilityWeights load(const std::string& path);
  static EasabilityWeights parse(std::string_view json_content);
  static EasabilityWeights defaults();
  std::string to_json() const;
};

struct ComponentScore {
  double z = 0.0;
  double percentile = 50.0;
  std::vector<std::string> imputed_inputs;  // inputs replaced by their reference mean
};

/// 100 * Phi(z).
double percentile_from_z(double z);

std::array<ComponentScore, kComponentCount> easability_components(const BaseMeasures& base,
                                                                  const ReferenceStats& ref,
                                                                  const EasabilityWeights& weights);

// ---------------------------------------------------------------------------
// Feature vectors

struct FeatureFlag {
  FeatureId id;
  bool imputed = false;  // value is a placeholder; the matrix replaces it with the column mean
  std::string note;
};

struct FeatureVector {
  std::string unit_id;
  SourceLabel label = SourceLabel::human;
  std::array<double, kFeatureCount> values{};
  std::vector<FeatureFlag> flags;

  double operator[](FeatureId id) const { return values[static_cast<std::size_t>(id)]; }
  bool is_imputed(FeatureId id) const;
};

struct ExtractionContext {
  const LanguageResources* resources = nullptr;
  EasabilityWeights weights = EasabilityWeights::defaults();
  VocdParams vocd;
  std::uint64_t seed = 0;
};

/// Feature vector for one unit. Unit-level failures become flags, never
/// partial vectors. The VOCD random stream derives from (seed, unit id).
FeatureVector extract_features(const TextUnit& unit, const ExtractionContext& ctx, const ReferenceStats& ref);
FeatureVector features_from_measures(const TextUnit& unit, const BaseMeasures& base, const ReferenceStats& ref,
                                     const EasabilityWeights& weights);

struct CorpusFeatures {
  std::vector<FeatureVector> vectors;
  std::vector<BaseMeasures> measures;
  ReferenceStats reference;
};

/// Two passes over the units: base measures (parallel over `threads`), then
/// the reference statistics (from `norms` if given, else from the units
/// themselves), then the vectors. Output order follows `units`.
CorpusFeatures extract_corpus(const std::vector<TextUnit>& units, const ExtractionContext& ctx,
                              const std::optional<ReferenceStats>& norms = std::nullopt, unsigned threads = 1);

}  // namespace psyling

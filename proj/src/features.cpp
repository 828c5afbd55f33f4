#include "psyling/features.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "psyling/stats.hpp"

namespace psyling {

namespace {

const std::vector<FeatureInfo> kCatalog = {
    {FeatureId::WC_TOTAL, "WC_TOTAL", "Total word count of the unit"},
    {FeatureId::SL_MEAN, "SL_MEAN", "Mean sentence length in words"},
    {FeatureId::SL_SD, "SL_SD", "Sentence length standard deviation (0 for one sentence)"},
    {FeatureId::WL_SYL_MEAN, "WL_SYL_MEAN", "Mean word length in syllables"},
    {FeatureId::WL_SYL_SD, "WL_SYL_SD", "Word length in syllables, standard deviation"},
    {FeatureId::WL_LET_MEAN, "WL_LET_MEAN", "Mean word length in letters"},
    {FeatureId::WL_LET_SD, "WL_LET_SD", "Word length in letters, standard deviation"},
    {FeatureId::TTR_CONTENT_LEMMA, "TTR_CONTENT_LEMMA", "Type-token ratio of content word lemmas"},
    {FeatureId::VOCD_D, "VOCD_D", "Lexical diversity D fitted to the TTR sampling curve"},
    {FeatureId::NP_DENSITY, "NP_DENSITY", "Noun phrase incidence"},
    {FeatureId::PASSIVE_INC, "PASSIVE_INC", "Passive voice incidence"},
    {FeatureId::CONN_ALL_INC, "CONN_ALL_INC", "Incidence of all connectives"},
    {FeatureId::PRP1S_INC, "PRP1S_INC", "First person singular pronoun incidence"},
    {FeatureId::PRP2_INC, "PRP2_INC", "Second person pronoun incidence"},
    {FeatureId::INTENTIONAL_VERB_INC, "INTENTIONAL_VERB_INC", "Intentional verb incidence"},
    {FeatureId::FREQ_CONTENT_LOG, "FREQ_CONTENT_LOG", "Mean log10 frequency per million of content words"},
    {FeatureId::AOA_CONTENT, "AOA_CONTENT", "Mean age of acquisition of content words"},
    {FeatureId::CONCRETENESS_MEAN, "CONCRETENESS_MEAN", "Mean concreteness of content words"},
    {FeatureId::NARRATIVITY_Z, "NARRATIVITY_Z", "Narrativity easability, z-score"},
    {FeatureId::NARRATIVITY_PCT, "NARRATIVITY_PCT", "Narrativity easability, percentile"},
    {FeatureId::SYNTAX_SIMPLICITY_Z, "SYNTAX_SIMPLICITY_Z", "Syntactic simplicity easability, z-score"},
    {FeatureId::SYNTAX_SIMPLICITY_PCT, "SYNTAX_SIMPLICITY_PCT", "Syntactic simplicity easability, percentile"},
    {FeatureId::CONCRETENESS_Z, "CONCRETENESS_Z", "Word concreteness easability, z-score"},
    {FeatureId::CONCRETENESS_PCT, "CONCRETENESS_PCT", "Word concreteness easability, percentile"},
    {FeatureId::REF_COHESION_Z, "REF_COHESION_Z", "Referential cohesion easability, z-score"},
    {FeatureId::REF_COHESION_PCT, "REF_COHESION_PCT", "Referential cohesion easability, percentile"},
    {FeatureId::DEEP_COHESION_Z, "DEEP_COHESION_Z", "Deep cohesion easability, z-score"},
    {FeatureId::DEEP_COHESION_PCT, "DEEP_COHESION_PCT", "Deep cohesion easability, percentile"},
    {FeatureId::VERB_COHESION_Z, "VERB_COHESION_Z", "Verb cohesion easability, z-score"},
    {FeatureId::VERB_COHESION_PCT, "VERB_COHESION_PCT", "Verb cohesion easability, percentile"},
    {FeatureId::CONNECTIVITY_Z, "CONNECTIVITY_Z", "Connectivity (explicit connectives) easability, z-score"},
    {FeatureId::CONNECTIVITY_PCT, "CONNECTIVITY_PCT", "Connectivity (explicit connectives) easability, percentile"},
    {FeatureId::TEMPORALITY_Z, "TEMPORALITY_Z", "Temporality easability, z-score"},
    {FeatureId::TEMPORALITY_PCT, "TEMPORALITY_PCT", "Temporality easability, percentile"},
};

constexpr std::array<std::string_view, kComponentCount> kComponentNames = {
    "NARRATIVITY",  "SYNTAX_SIMPLICITY", "CONCRETENESS", "REF_COHESION",
    "DEEP_COHESION", "VERB_COHESION",     "CONNECTIVITY", "TEMPORALITY"};

constexpr std::size_t kBaseFeatureCount = 18;  // catalog entries before the easability block

}  // namespace

const std::vector<FeatureInfo>& feature_catalog() { return kCatalog; }

std::string_view to_string(FeatureId id) { return kCatalog[static_cast<std::size_t>(id)].name; }

std::optional<FeatureId> find_feature_id(std::string_view name) {
  for (const auto& info : kCatalog) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

FeatureId parse_feature_id(std::string_view name) {
  if (auto id = find_feature_id(name)) return *id;
  throw ValidationError("unknown feature id '" + std::string(name) + "'");
}

std::string_view to_string(Component c) { return kComponentNames[static_cast<std::size_t>(c)]; }

Component parse_component(std::string_view name) {
  for (std::size_t i = 0; i < kComponentNames.size(); ++i) {
    if (kComponentNames[i] == name) return static_cast<Component>(i);
  }
  throw ValidationError("unknown easability component '" + std::string(name) + "'");
}

FeatureId z_feature(Component c) {
  return static_cast<FeatureId>(kBaseFeatureCount + 2 * static_cast<std::size_t>(c));
}

FeatureId pct_feature(Component c) {
  return static_cast<FeatureId>(kBaseFeatureCount + 2 * static_cast<std::size_t>(c) + 1);
}

// ---------------------------------------------------------------------------

double incidence(double count, std::size_t total_words) {
  if (total_words == 0) throw InvalidInput("incidence: total_words must be >= 1");
  return 1000.0 * count / static_cast<double>(total_words);
}

double ttr_content_lemmas(std::span<const Token> tokens) {
  std::unordered_set<std::string> types;
  std::size_t count = 0;
  for (const auto& t : tokens) {
    if (!t.is_content) continue;
    ++count;
    types.insert(t.lemma);
  }
  if (count == 0) throw InvalidInput("ttr_content_lemmas: no content tokens");
  return static_cast<double>(types.size()) / static_cast<double>(count);
}

double vocd_curve(double n, double d) { return (d / n) * (std::sqrt(1.0 + 2.0 * n / d) - 1.0); }

std::pair<double, bool> fit_vocd_d(std::span<const double> mean_ttr, int min_size, double max_d) {
  if (mean_ttr.empty()) throw InvalidInput("fit_vocd_d: no TTR values");
  if (std::all_of(mean_ttr.begin(), mean_ttr.end(), [](double t) { return t >= 1.0 - 1e-12; })) {
    return {max_d, true};
  }
  auto loss = [&](double d) {
    double s = 0.0;
    for (std::size_t i = 0; i < mean_ttr.size(); ++i) {
      const double r = mean_ttr[i] - vocd_curve(static_cast<double>(min_size) + static_cast<double>(i), d);
      s += r * r;
    }
    return s;
  };
  // Coarse scan, then golden-section refinement around the best grid point.
  constexpr int kGrid = 2000;
  const double step = max_d / kGrid;
  double best_d = step;
  double best = loss(best_d);
  for (int g = 2; g <= kGrid; ++g) {
    const double d = step * g;
    const double v = loss(d);
    if (v < best) {
      best = v;
      best_d = d;
    }
  }
  double lo = std::max(best_d - step, 1e-9);
  double hi = std::min(best_d + step, max_d);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = loss(x1), f2 = loss(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = loss(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = loss(x2);
    }
  }
  double d = 0.5 * (lo + hi);
  if (loss(max_d) <= loss(d)) d = max_d;
  const bool capped = d >= max_d - 1e-6;
  return {std::min(d, max_d), capped};
}

VocdResult vocd(std::span<const std::string> words, const VocdParams& params, std::uint64_t seed) {
  if (params.min_size < 1 || params.max_size < params.min_size || params.samples_per_size < 1 || params.runs < 1) {
    throw InvalidInput("vocd: invalid parameters");
  }
  if (words.size() < static_cast<std::size_t>(params.max_size)) {
    throw InvalidInput("vocd: needs at least " + std::to_string(params.max_size) + " tokens, got " +
                       std::to_string(words.size()));
  }
  // Canonical token sequence: type ids by descending frequency.
  std::unordered_map<std::string_view, std::size_t> counts;
  for (const auto& w : words) ++counts[w];
  std::vector<std::size_t> freqs;
  freqs.reserve(counts.size());
  for (const auto& [w, c] : counts) freqs.push_back(c);
  std::sort(freqs.begin(), freqs.end(), std::greater<>());
  std::vector<std::uint32_t> canonical;
  canonical.reserve(words.size());
  for (std::size_t type = 0; type < freqs.size(); ++type) {
    canonical.insert(canonical.end(), freqs[type], static_cast<std::uint32_t>(type));
  }

  VocdResult result;
  std::vector<std::uint32_t> pool = canonical;
  std::vector<std::uint64_t> stamp(freqs.size(), 0);
  std::uint64_t sample_id = 0;
  double d_sum = 0.0;
  for (int run = 0; run < params.runs; ++run) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(run)));
    pool = canonical;
    std::vector<double> mean_ttr;
    for (int n = params.min_size; n <= params.max_size; ++n) {
      double ttr_sum = 0.0;
      for (int s = 0; s < params.samples_per_size; ++s) {
        ++sample_id;
        std::size_t distinct = 0;
        // Partial Fisher-Yates: the first n slots become a uniform sample without replacement.
        for (int i = 0; i < n; ++i) {
          const std::size_t j = static_cast<std::size_t>(i) + rng.below(pool.size() - static_cast<std::size_t>(i));
          std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
          const auto type = pool[static_cast<std::size_t>(i)];
          if (stamp[type] != sample_id) {
            stamp[type] = sample_id;
            ++distinct;
          }
        }
        ttr_sum += static_cast<double>(distinct) / n;
      }
      mean_ttr.push_back(ttr_sum / params.samples_per_size);
    }
    const auto [d, capped] = fit_vocd_d(mean_ttr, params.min_size, params.max_d);
    result.run_d.push_back(d);
    result.capped = result.capped || capped;
    d_sum += d;
  }
  result.d = d_sum / params.runs;
  return result;
}

std::size_t count_noun_phrases(std::span<const Token> tokens) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (tokens[i].pos == Pos::pronoun) {
      ++count;
      ++i;
      continue;
    }
    std::size_t j = i;
    if (tokens[j].pos == Pos::determiner) ++j;
    while (j < tokens.size() && tokens[j].pos == Pos::adjective) ++j;
    if (j < tokens.size() && tokens[j].pos == Pos::noun) {
      while (j < tokens.size() && tokens[j].pos == Pos::noun) ++j;
      ++count;
      i = j;
    } else {
      ++i;
    }
  }
  return count;
}

namespace {
std::size_t count_words(std::span<const Token> tokens) {
  return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word(); }));
}
}  // namespace

double np_density(std::span<const Token> tokens) {
  return incidence(static_cast<double>(count_noun_phrases(tokens)), count_words(tokens));
}

namespace {

bool is_participle(const Token& t, const LanguageResources& res) {
  if (res.list(WordListName::irregular_participles).contains(t.lower)) return true;
  if (t.pos != Pos::verb) return false;
  return (t.lower.size() > 3 && ends_with(t.lower, "ed")) || (t.lower.size() > 3 && ends_with(t.lower, "en"));
}

}  // namespace

std::size_t count_passives(const Sentence& sentence, const LanguageResources& res) {
  const auto& be = res.list(WordListName::be_forms);
  std::vector<const Token*> words;
  for (const auto& t : sentence.tokens) {
    if (t.is_word()) words.push_back(&t);
  }
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < words.size()) {
    if (!be.contains(words[i]->lower)) {
      ++i;
      continue;
    }
    std::size_t found = 0;
    for (std::size_t j = i + 1; j <= i + 2 && j < words.size(); ++j) {
      if (is_participle(*words[j], res)) {
        found = j;
        break;
      }
    }
    if (found) {
      ++count;
      i = found + 1;
    } else {
      ++i;
    }
  }
  return count;
}

double passive_incidence(std::span<const Sentence> sentences, const LanguageResources& res) {
  std::size_t passives = 0, words = 0;
  for (const auto& s : sentences) {
    passives += count_passives(s, res);
    words += count_words(s.tokens);
  }
  return incidence(static_cast<double>(passives), words);
}

WordInfo word_info_means(std::span<const Token> tokens, const Lexicon& lexicon) {
  WordInfo info;
  double freq_sum = 0.0, aoa_sum = 0.0, conc_sum = 0.0;
  std::size_t content = 0, freq_hits = 0, aoa_n = 0, conc_n = 0;
  for (const auto& t : tokens) {
    if (!t.is_content) continue;
    ++content;
    const LexiconEntry* entry = lexicon.lookup(t.lower);
    if (!entry) entry = lexicon.lookup(t.lemma);
    if (entry && entry->log_frequency) {
      freq_sum += *entry->log_frequency;
      ++freq_hits;
    }
    if (entry && entry->aoa) {
      aoa_sum += *entry->aoa;
      ++aoa_n;
    }
    if (entry && entry->concreteness) {
      conc_sum += *entry->concreteness;
      ++conc_n;
    }
  }
  if (content == 0) return info;
  const double c = static_cast<double>(content);
  info.frequency_coverage = static_cast<double>(freq_hits) / c;
  info.aoa_coverage = static_cast<double>(aoa_n) / c;
  info.concreteness_coverage = static_cast<double>(conc_n) / c;
  if (freq_hits) info.frequency = freq_sum / c;  // misses contribute the 0 floor
  if (aoa_n) info.aoa = aoa_sum / static_cast<double>(aoa_n);
  if (conc_n) info.concreteness = conc_sum / static_cast<double>(conc_n);
  return info;
}

// ---------------------------------------------------------------------------
// Units

std::string_view to_string(Granularity g) { return g == Granularity::sentence ? "sentence" : "document"; }

Granularity parse_granularity(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "sentence") return Granularity::sentence;
  if (t == "document") return Granularity::document;
  throw ValidationError("unknown unit granularity '" + std::string(text) + "'");
}

std::vector<TextUnit> build_units(const std::vector<LabeledDocument>& docs, const LanguageResources& res,
                                  Granularity granularity) {
  std::vector<TextUnit> units;
  for (const auto& doc : docs) {
    std::vector<Sentence> sentences;
    for (auto& s : segment_sentences(doc, res.segmentation)) {
      sentences.push_back(tokenize_and_annotate(std::move(s), res));
    }
    if (granularity == Granularity::document) {
      units.push_back({doc.id, doc.source_label, std::move(sentences)});
      continue;
    }
    for (auto& s : sentences) {
      TextUnit unit;
      unit.id = doc.id + "#" + std::to_string(s.index);
      unit.label = doc.source_label;
      unit.sentences.push_back(std::move(s));
      units.push_back(std::move(unit));
    }
  }
  return units;
}

// ---------------------------------------------------------------------------
// Base measures

std::optional<double> BaseMeasures::get(const std::string& name) const {
  const auto it = values.find(name);
  return it == values.end() ? std::nullopt : it->second;
}

const std::vector<std::string>& auxiliary_measures() {
  static const std::vector<std::string> names = {"PRONOUN_INC",       "CONN_CAUSAL_INC",   "CONN_LOGICAL_INC",
                                                 "CONN_EXPLICIT_INC", "CONN_TEMPORAL_INC", "LEMMA_OVERLAP_ADJ",
                                                 "VERB_OVERLAP_ADJ",  "TENSE_CONSISTENCY"};
  return names;
}

namespace {

std::size_t list_matches(const std::vector<Sentence>& sentences, const WordList& list) {
  std::size_t n = 0;
  for (const auto& s : sentences) {
    std::vector<std::string> words;
    for (const auto& t : s.tokens) {
      if (t.is_word()) words.push_back(t.lower);
    }
    n += match_phrases(words, list).size();
  }
  return n;
}

// Spans used for adjacent-overlap measures: the sentences when there are at
// least two, otherwise the clauses of the single sentence.
std::vector<std::vector<const Token*>> overlap_segments(const TextUnit& unit) {
  std::vector<std::vector<const Token*>> segments;
  auto has_content = [](const std::vector<const Token*>& seg) {
    return std::any_of(seg.begin(), seg.end(), [](const Token* t) { return t->is_content; });
  };
  if (unit.sentences.size() >= 2) {
    for (const auto& s : unit.sentences) {
      std::vector<const Token*> seg;
      for (const auto& t : s.tokens) seg.push_back(&t);
      segments.push_back(std::move(seg));
    }
    return segments;
  }
  if (unit.sentences.empty()) return segments;
  std::vector<const Token*> current;
  for (const auto& t : unit.sentences.front().tokens) {
    const bool boundary = (t.pos == Pos::punctuation && (t.lower == "," || t.lower == ";" || t.lower == ":")) ||
                          t.pos == Pos::conjunction;
    if (boundary) {
      if (has_content(current)) segments.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(&t);
  }
  if (has_content(current)) segments.push_back(std::move(current));
  return segments;
}

std::optional<double> adjacent_overlap(const std::vector<std::vector<const Token*>>& segments, bool verbs_only) {
  if (segments.size() < 2) return std::nullopt;
  auto lemmas = [&](const std::vector<const Token*>& seg) {
    std::set<std::string> out;
    for (const Token* t : seg) {
      if (!t->is_content) continue;
      if (verbs_only && t->pos != Pos::verb) continue;
      out.insert(t->lemma);
    }
    return out;
  };
  std::size_t shared = 0;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    const auto a = lemmas(segments[i]);
    const auto b = lemmas(segments[i + 1]);
    if (std::any_of(a.begin(), a.end(), [&](const std::string& x) { return b.count(x) > 0; })) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(segments.size() - 1);
}

bool is_past_form(const Token& t, const LanguageResources& res) {
  if (t.lower.size() > 3 && ends_with(t.lower, "ed")) return true;
  const auto it = res.irregular_lemmas.find(t.lower);
  if (it == res.irregular_lemmas.end() || it->second.lemma == t.lower) return false;
  static const std::unordered_set<std::string> present_forms = {"am", "is", "are", "has", "does", "'m", "'re"};
  if (present_forms.count(t.lower) || ends_with(t.lower, "ing") || ends_with(t.lower, "s")) return false;
  return t.lower.find('\'') == std::string::npos;
}

std::optional<double> mean_or_empty(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return stats::mean(xs);
}

double sd_or_zero(const std::vector<double>& xs) { return xs.size() >= 2 ? stats::sample_sd(xs) : 0.0; }

}  // namespace

BaseMeasures compute_base_measures(const TextUnit& unit, const LanguageResources& res, const VocdParams& vocd_params,
                                   std::uint64_t seed) {
  BaseMeasures m;
  auto set = [&](const std::string& name, std::optional<double> value, const std::string& note = "") {
    m.values[name] = value;
    if (!value && !note.empty()) m.notes[name] = note;
  };

  std::vector<Token> tokens;
  std::vector<double> sentence_lengths;
  for (const auto& s : unit.sentences) {
    sentence_lengths.push_back(static_cast<double>(count_words(s.tokens)));
    tokens.insert(tokens.end(), s.tokens.begin(), s.tokens.end());
  }
  const std::size_t words = count_words(tokens);
  set("WC_TOTAL", static_cast<double>(words));
  set("SL_MEAN", mean_or_empty(sentence_lengths), "no sentences");
  m.values["SL_SD"] = unit.sentences.empty() ? std::nullopt : std::optional<double>(sd_or_zero(sentence_lengths));

  std::vector<double> syllables, letters;
  std::vector<std::string> lowers;
  for (const auto& t : tokens) {
    if (!t.is_word()) continue;
    lowers.push_back(t.lower);
    if (t.letters == 0) continue;  // numbers
    syllables.push_back(t.syllables);
    letters.push_back(t.letters);
  }
  set("WL_SYL_MEAN", mean_or_empty(syllables), "no alphabetic words");
  set("WL_LET_MEAN", mean_or_empty(letters), "no alphabetic words");
  m.values["WL_SYL_SD"] = syllables.empty() ? std::nullopt : std::optional<double>(sd_or_zero(syllables));
  m.values["WL_LET_SD"] = letters.empty() ? std::nullopt : std::optional<double>(sd_or_zero(letters));
  if (syllables.empty()) m.notes["WL_SYL_SD"] = m.notes["WL_LET_SD"] = "no alphabetic words";

  try {
    set("TTR_CONTENT_LEMMA", ttr_content_lemmas(tokens));
  } catch (const InvalidInput&) {
    set("TTR_CONTENT_LEMMA", std::nullopt, "no content words");
  }

  if (lowers.size() >= static_cast<std::size_t>(vocd_params.max_size)) {
    const VocdResult v = vocd(lowers, vocd_params, derive_seed(seed, unit.id));
    set("VOCD_D", v.d);
    if (v.capped) m.notes["VOCD_D"] = "fit diverged; capped at " + format_double(vocd_params.max_d);
  } else {
    set("VOCD_D", std::nullopt, "fewer than " + std::to_string(vocd_params.max_size) + " tokens");
  }

  if (words == 0) {
    for (const char* name : {"NP_DENSITY", "PASSIVE_INC", "CONN_ALL_INC", "PRP1S_INC", "PRP2_INC",
                             "INTENTIONAL_VERB_INC", "PRONOUN_INC", "CONN_CAUSAL_INC", "CONN_LOGICAL_INC",
                             "CONN_EXPLICIT_INC", "CONN_TEMPORAL_INC"}) {
      set(name, std::nullopt, "no words");
    }
  } else {
    std::size_t nps = 0;
    for (const auto& s : unit.sentences) nps += count_noun_phrases(s.tokens);
    set("NP_DENSITY", incidence(static_cast<double>(nps), words));
    set("PASSIVE_INC", passive_incidence(unit.sentences, res));
    auto list_inc = [&](WordListName name) {
      return incidence(static_cast<double>(list_matches(unit.sentences, res.list(name))), words);
    };
    set("CONN_ALL_INC", list_inc(WordListName::connectives_all));
    set("PRP1S_INC", list_inc(WordListName::pronouns_first_singular));
    set("PRP2_INC", list_inc(WordListName::pronouns_second));
    set("CONN_CAUSAL_INC", list_inc(WordListName::connectives_causal));
    set("CONN_LOGICAL_INC", list_inc(WordListName::connectives_logical));
    set("CONN_EXPLICIT_INC", list_inc(WordListName::connectives_explicit));
    set("CONN_TEMPORAL_INC", list_inc(WordListName::connectives_temporal));

    const auto& intentional = res.list(WordListName::intentional_verbs);
    std::size_t intentional_n = 0, pronouns = 0;
    for (const auto& t : tokens) {
      if (t.pos == Pos::verb && intentional.contains(t.lemma)) ++intentional_n;
      if (t.pos == Pos::pronoun) ++pronouns;
    }
    set("INTENTIONAL_VERB_INC", incidence(static_cast<double>(intentional_n), words));
    set("PRONOUN_INC", incidence(static_cast<double>(pronouns), words));
  }

  const WordInfo info = word_info_means(tokens, res.lexicon);
  set("FREQ_CONTENT_LOG", info.frequency, "no content word found in the lexicon");
  set("AOA_CONTENT", info.aoa, "no content word with an age-of-acquisition value");
  set("CONCRETENESS_MEAN", info.concreteness, "no content word with a concreteness value");

  const auto segments = overlap_segments(unit);
  set("LEMMA_OVERLAP_ADJ", adjacent_overlap(segments, false), "fewer than two sentences or clauses");
  set("VERB_OVERLAP_ADJ", adjacent_overlap(segments, true), "fewer than two sentences or clauses");

  std::size_t verbs = 0, past = 0;
  for (const auto& t : tokens) {
    if (t.pos != Pos::verb) continue;
    ++verbs;
    if (is_past_form(t, res)) ++past;
  }
  if (verbs == 0) {
    set("TENSE_CONSISTENCY", std::nullopt, "no verbs");
  } else {
    set("TENSE_CONSISTENCY", static_cast<double>(std::max(past, verbs - past)) / static_cast<double>(verbs));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Reference statistics and easability

ReferenceStats ReferenceStats::load(const std::string& path) { return parse(read_file(path), path); }

ReferenceStats ReferenceStats::parse(std::string_view csv_content, const std::string& source) {
  ReferenceStats ref;
  ref.source = source;
  const auto rows = parse_csv(csv_content);
  if (rows.empty()) throw SchemaError("norms file " + source + " is empty");
  const auto& header = rows.front().fields;
  if (header.size() != 3 || to_lower(trim(header[0])) != "feature" || to_lower(trim(header[1])) != "mean" ||
      to_lower(trim(header[2])) != "sd") {
    throw SchemaError("norms file " + source + " must have header feature,mean,sd");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 3) throw SchemaError("norms row " + std::to_string(row.line) + ": expected 3 columns");
    Moments mo;
    try {
      mo.mean = parse_double(row.fields[1]);
      mo.sd = parse_double(row.fields[2]);
    } catch (const ValidationError& e) {
      throw SchemaError("norms row " + std::to_string(row.line) + ": " + e.what());
    }
    if (!(mo.sd > 0.0) || !std::isfinite(mo.mean) || !std::isfinite(mo.sd)) {
      throw ValidationError("norms row " + std::to_string(row.line) + ": sd must be positive and finite");
    }
    ref.moments[std::string(trim(row.fields[0]))] = mo;
  }
  return ref;
}

ReferenceStats ReferenceStats::from_measures(std::span<const BaseMeasures> measures) {
  ReferenceStats ref;
  ref.source = "corpus";
  std::map<std::string, std::vector<double>> columns;
  for (const auto& m : measures) {
    for (const auto& [name, value] : m.values) {
      auto& col = columns[name];
      if (value) col.push_back(*value);
    }
  }
  for (const auto& [name, col] : columns) {
    Moments mo;
    mo.mean = col.empty() ? 0.0 : stats::mean(col);
    const double sd = col.size() >= 2 ? stats::sample_sd(col) : 0.0;
    if (sd > 0.0) {
      mo.sd = sd;
    } else {
      mo.sd = 1.0;
      ref.degenerate.push_back(name);
    }
    ref.moments[name] = mo;
  }
  return ref;
}

std::string ReferenceStats::to_csv() const {
  std::string out = "feature,mean,sd\n";
  for (const auto& [name, mo] : moments) out += name + "," + format_double(mo.mean) + "," + format_double(mo.sd) + "\n";
  return out;
}

EasabilityWeights EasabilityWeights::defaults() {
  const double h = std::sqrt(0.5);
  EasabilityWeights w;
  w.version = "1";
  auto& c = w.weights;
  c[static_cast<std::size_t>(Component::NARRATIVITY)] = {
      {"FREQ_CONTENT_LOG", 0.5}, {"PRONOUN_INC", 0.5}, {"INTENTIONAL_VERB_INC", 0.5}, {"WL_SYL_MEAN", -0.5}};
  c[static_cast<std::size_t>(Component::SYNTAX_SIMPLICITY)] = {{"SL_MEAN", -h}, {"NP_DENSITY", -h}};
  c[static_cast<std::size_t>(Component::CONCRETENESS)] = {{"CONCRETENESS_MEAN", 1.0}};
  c[static_cast<std::size_t>(Component::REF_COHESION)] = {{"LEMMA_OVERLAP_ADJ", 1.0}};
  c[static_cast<std::size_t>(Component::DEEP_COHESION)] = {{"CONN_CAUSAL_INC", h}, {"CONN_LOGICAL_INC", h}};
  c[static_cast<std::size_t>(Component::VERB_COHESION)] = {{"VERB_OVERLAP_ADJ", 1.0}};
  c[static_cast<std::size_t>(Component::CONNECTIVITY)] = {{"CONN_EXPLICIT_INC", 1.0}};
  c[static_cast<std::size_t>(Component::TEMPORALITY)] = {{"CONN_TEMPORAL_INC", h}, {"TENSE_CONSISTENCY", h}};
  return w;
}

EasabilityWeights EasabilityWeights::load(const std::string& path) { return parse(read_file(path)); }

EasabilityWeights EasabilityWeights::parse(std::string_view json_content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_content);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("easability weights: invalid JSON: ") + e.what());
  }
  EasabilityWeights w;
  w.version = doc.value("version", std::string());
  if (!doc.contains("components") || !doc["components"].is_object()) {
    throw SchemaError("easability weights: missing 'components' object");
  }
  std::array<bool, kComponentCount> seen{};
  for (const auto& [name, inputs] : doc["components"].items()) {
    const Component c = parse_component(name);
    seen[static_cast<std::size_t>(c)] = true;
    auto& target = w.weights[static_cast<std::size_t>(c)];
    for (const auto& [input, weight] : inputs.items()) {
      if (!weight.is_number()) throw SchemaError("easability weights: " + name + "." + input + " is not a number");
      target[input] = weight.get<double>();
    }
    if (target.empty()) throw SchemaError("easability weights: component " + name + " has no inputs");
  }
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    if (!seen[i]) throw SchemaError("easability weights: missing component " + std::string(kComponentNames[i]));
  }
  return w;
}

std::string EasabilityWeights::to_json() const {
  nlohmann::json doc;
  doc["version"] = version;
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    for (const auto& [input, weight] : weights[i]) doc["components"][std::string(kComponentNames[i])][input] = weight;
  }
  return doc.dump(2);
}

double percentile_from_z(double z) { return 100.0 * stats::normal_cdf(z); }

std::array<ComponentScore, kComponentCount> easability_components(const BaseMeasures& base,
                                                                  const ReferenceStats& ref,
                                                                  const EasabilityWeights& weights) {
  std::array<ComponentScore, kComponentCount> out;
  for (std::size_t c = 0; c < kComponentCount; ++c) {
    ComponentScore score;
    for (const auto& [input, weight] : weights.weights[c]) {
      const auto it = ref.moments.find(input);
      if (it == ref.moments.end()) throw InvalidInput("reference statistics lack '" + input + "'");
      if (!(it->second.sd > 0.0)) throw InvalidInput("reference SD for '" + input + "' must be > 0");
      const auto value = base.get(input);
      if (!value) {
        score.imputed_inputs.push_back(input);
        continue;
      }
      score.z += weight * (*value - it->second.mean) / it->second.sd;
    }
    score.percentile = percentile_from_z(score.z);
    out[c] = std::move(score);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vectors

bool FeatureVector::is_imputed(FeatureId id) const {
  return std::any_of(flags.begin(), flags.end(), [&](const FeatureFlag& f) { return f.id == id && f.imputed; });
}

FeatureVector features_from_measures(const TextUnit& unit, const BaseMeasures& base, const ReferenceStats& ref,
                                     const EasabilityWeights& weights) {
  FeatureVector v;
  v.unit_id = unit.id;
  v.label = unit.label;
  for (std::size_t i = 0; i < kBaseFeatureCount; ++i) {
    const auto id = static_cast<FeatureId>(i);
    const std::string name(to_string(id));
    const auto value = base.get(name);
    const auto note = base.notes.find(name);
    if (value) {
      v.values[i] = *value;
      if (note != base.notes.end()) v.flags.push_back({id, false, note->second});
    } else {
      v.values[i] = 0.0;
      v.flags.push_back({id, true, note != base.notes.end() ? note->second : "not computable"});
    }
  }
  const auto components = easability_components(base, ref, weights);
  for (std::size_t c = 0; c < kComponentCount; ++c) {
    const auto comp = static_cast<Component>(c);
    v.values[static_cast<std::size_t>(z_feature(comp))] = components[c].z;
    v.values[static_cast<std::size_t>(pct_feature(comp))] = components[c].percentile;
    if (!components[c].imputed_inputs.empty()) {
      const std::string note = "inputs at reference mean: " + join(components[c].imputed_inputs, ", ");
      v.flags.push_back({z_feature(comp), false, note});
      v.flags.push_back({pct_feature(comp), false, note});
    }
  }
  return v;
}

FeatureVector extract_features(const TextUnit& unit, const ExtractionContext& ctx, const ReferenceStats& ref) {
  if (!ctx.resources) throw InvalidInput("extract_features: no language resources");
  const BaseMeasures base = compute_base_measures(unit, *ctx.resources, ctx.vocd, ctx.seed);
  return features_from_measures(unit, base, ref, ctx.weights);
}

CorpusFeatures extract_corpus(const std::vector<TextUnit>& units, const ExtractionContext& ctx,
                              const std::optional<ReferenceStats>& norms, unsigned threads) {
  if (!ctx.resources) throw InvalidInput("extract_corpus: no language resources");
  CorpusFeatures out;
  out.measures.resize(units.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(units.size(), 1))));

  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned worker) {
    try {
      for (std::size_t i = worker; i < units.size(); i += threads) {
        out.measures[i] = compute_base_measures(units[i], *ctx.resources, ctx.vocd, ctx.seed);
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  out.reference = norms ? *norms : ReferenceStats::from_measures(out.measures);
  out.vectors.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    out.vectors.push_back(features_from_measures(units[i], out.measures[i], out.reference, ctx.weights));
  }
  return out;
}

}  // namespace psyling

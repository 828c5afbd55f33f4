#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "psyling/common.hpp"
#include "psyling/lexicon.hpp"

namespace psyling {

enum class Topic { glycolysis, enzyme_kinetics, other };

std::string_view to_string(Topic topic);
Topic parse_topic(std::string_view text);

struct LabeledDocument {
  std::string id;
  SourceLabel source_label = SourceLabel::human;
  Topic topic = Topic::other;
  std::string text;
};

struct Token {
  std::string surface;
  std::string lower;
  std::string lemma;
  Pos pos = Pos::other;
  bool is_content = false;
  int syllables = 0;
  int letters = 0;
  bool in_lexicon = false;  // false: lemma and POS came from fallback heuristics

  bool is_word() const { return pos != Pos::punctuation; }
};

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;       // trimmed
  std::size_t begin = 0;  // byte span in the document text, [begin, end)
  std::size_t end = 0;
  std::vector<Token> tokens;
};

enum class CorpusFormat { jsonl, csv };

/// Guesses the format from the file extension (.jsonl/.json or .csv).
CorpusFormat corpus_format_from_path(const std::string& path);
std::vector<LabeledDocument> load_corpus(const std::string& path, CorpusFormat format);
std::vector<LabeledDocument> parse_corpus(std::string_view content, CorpusFormat format);

/// Splits on . ! ? (plus trailing closing quotes/brackets) followed by
/// whitespace and a capital, or by the end of the text. A period ending a
/// listed abbreviation or a single-letter initial is not a boundary.
/// The spans tile the document: trailing whitespace belongs to the sentence
/// before it.
std::vector<Sentence> segment_sentences(const LabeledDocument& doc, const SegmentationRules& rules);

/// Splits text into word and punctuation tokens with surface/lower filled
/// and no annotation.
std::vector<Token> tokenize(std::string_view text);

/// Fills lemma, POS, content flag, syllables and letters for every token.
Sentence tokenize_and_annotate(Sentence sentence, const LanguageResources& resources);

/// Lexicon syllable count when present, else the vowel-group heuristic.
int count_syllables(std::string_view word, const Lexicon* lexicon = nullptr);
/// The vowel-group heuristic alone.
int heuristic_syllables(std::string_view word);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample (n-1); 0 when n < 2
  std::size_t n = 0;
};

MeanSd mean_sd(const std::vector<double>& values);

struct LabelSummary {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  MeanSd sentences_per_document;
  MeanSd words_per_sentence;
};

/// Per-label descriptive counts (sentences per document, words per sentence).
std::map<SourceLabel, LabelSummary> corpus_summary(const std::vector<LabeledDocument>& docs,
                                                   const SegmentationRules& rules);

}  // namespace psyling

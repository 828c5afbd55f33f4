#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "psyling/common.hpp"

namespace psyling {

/// One row of the word-information lexicon.
///
/// Frequency is log10 occurrences per million (CELEX-style); age of
/// acquisition is in years; concreteness is on the source norm's own scale.
struct LexiconEntry {
  std::string word;
  std::optional<double> log_frequency;
  std::optional<double> aoa;
  std::optional<double> concreteness;
  std::vector<Pos> pos_tags;  // in preference order
  std::optional<int> syllables;

  bool has_tag(Pos pos) const;
};

class Lexicon {
 public:
  struct LoadReport {
    std::size_t rows = 0;
    std::size_t duplicates = 0;  // later rows that replaced an earlier entry
  };

  /// Reads the CSV format `word,log_frequency,aoa,concreteness,pos_tags,syllables`.
  /// pos_tags are separated by '|'. Empty numeric cells mean "unknown".
  static Lexicon load(const std::string& path, LoadReport* report = nullptr);
  static Lexicon parse(std::string_view csv_content, LoadReport* report = nullptr);

  /// Case-insensitive exact match.
  const LexiconEntry* lookup(std::string_view word) const;
  void insert(LexiconEntry entry);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::unordered_map<std::string, LexiconEntry> entries_;
};

enum class WordListName {
  connectives_all,
  connectives_explicit,
  connectives_causal,
  connectives_logical,
  connectives_temporal,
  connectives_additive,
  pronouns_first_singular,
  pronouns_second,
  intentional_verbs,
  be_forms,
  irregular_participles
};

std::string_view to_string(WordListName name);
WordListName parse_word_list_name(std::string_view text);
const std::vector<WordListName>& all_word_list_names();

/// A named set of words or space-normalized phrases.
class WordList {
 public:
  WordList(WordListName name, const std::vector<std::string>& entries);

  /// Word-list file: a `# name: <list>` header, then one entry per line.
  /// Other lines starting with '#' are comments.
  static WordList load(const std::string& path);
  static WordList parse(std::string_view content, const std::string& origin = "<memory>");

  WordListName name() const { return name_; }
  bool contains(std::string_view entry) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t longest_phrase() const { return longest_; }

 private:
  WordListName name_;
  std::unordered_set<std::string> entries_;
  std::size_t longest_ = 1;
};

struct PhraseMatch {
  std::size_t begin = 0;  // index of the first word
  std::size_t length = 0;
};

/// Greedy left-to-right longest-phrase scan over lowercase words.
std::vector<PhraseMatch> match_phrases(const std::vector<std::string>& words, const WordList& list);

/// Sentence segmentation rules shipped as a versioned data file.
struct SegmentationRules {
  std::unordered_set<std::string> abbreviations;  // lowercase, with trailing '.'
  std::string version;

  static SegmentationRules load(const std::string& path);
  static SegmentationRules parse(std::string_view content);
};

/// Everything the annotator and feature engine read: lexicon, word lists,
/// stop words, irregular lemmas and segmentation rules.
struct LanguageResources {
  Lexicon lexicon;
  std::map<WordListName, WordList> lists;
  std::unordered_set<std::string> stop_words;
  struct IrregularForm {
    std::string lemma;
    std::optional<Pos> pos;  // fixes the tag when the form is unambiguous
  };
  std::unordered_map<std::string, IrregularForm> irregular_lemmas;
  SegmentationRules segmentation;
  /// file role -> fingerprint, echoed in reports.
  std::map<std::string, std::string> provenance;

  const WordList& list(WordListName name) const;
  bool is_stop_word(std::string_view lower) const { return stop_words.count(std::string(lower)) > 0; }
};

/// Loads the standard layout under data_dir:
///   lexicon/core_lexicon.csv, wordlists/<name>.txt, stopwords.txt,
///   lemmas.txt (form lemma [pos]), segmentation/abbreviations.txt
/// A non-empty lexicon_path replaces the default lexicon file.
LanguageResources load_resources(const std::string& data_dir, const std::string& lexicon_path = "");

/// Resolves the data directory: explicit value, then $PSYLING_DATA_DIR, then
/// the directory compiled into the build.
std::string resolve_data_dir(const std::string& explicit_dir = "");

}  // namespace psyling

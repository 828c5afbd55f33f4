#include "psyling/lexicon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#ifndef PSYLING_DEFAULT_DATA_DIR
#define PSYLING_DEFAULT_DATA_DIR "data"
#endif

namespace psyling {

bool LexiconEntry::has_tag(Pos pos) const {
  return std::find(pos_tags.begin(), pos_tags.end(), pos) != pos_tags.end();
}

namespace {

std::optional<double> optional_number(const std::string& cell, std::size_t line, std::string_view column) {
  if (trim(cell).empty()) return std::nullopt;
  double value = 0.0;
  try {
    value = parse_double(cell);
  } catch (const ValidationError&) {
    throw SchemaError("lexicon row " + std::to_string(line) + ": column " + std::string(column) +
                      " is not numeric ('" + cell + "')");
  }
  if (!std::isfinite(value)) {
    throw SchemaError("lexicon row " + std::to_string(line) + ": column " + std::string(column) + " is not finite");
  }
  return value;
}

}  // namespace

Lexicon Lexicon::load(const std::string& path, LoadReport* report) { return parse(read_file(path), report); }

Lexicon Lexicon::parse(std::string_view csv_content, LoadReport* report) {
  Lexicon lex;
  LoadReport local;
  const auto rows = parse_csv(csv_content);
  if (rows.empty()) {
    if (report) *report = local;
    return lex;
  }
  static constexpr std::array<std::string_view, 6> kHeader = {"word",         "log_frequency", "aoa",
                                                              "concreteness", "pos_tags",      "syllables"};
  const auto& header = rows.front().fields;
  if (header.size() != kHeader.size()) throw SchemaError("lexicon header must be: word,log_frequency,aoa,concreteness,pos_tags,syllables");
  for (std::size_t i = 0; i < kHeader.size(); ++i) {
    if (to_lower(trim(header[i])) != kHeader[i]) {
      throw SchemaError("lexicon header column " + std::to_string(i + 1) + " must be '" + std::string(kHeader[i]) + "'");
    }
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != kHeader.size()) {
      throw SchemaError("lexicon row " + std::to_string(row.line) + ": expected 6 columns, got " +
                        std::to_string(row.fields.size()));
    }
    LexiconEntry entry;
    entry.word = to_lower(trim(row.fields[0]));
    if (entry.word.empty()) throw SchemaError("lexicon row " + std::to_string(row.line) + ": empty word");
    entry.log_frequency = optional_number(row.fields[1], row.line, "log_frequency");
    entry.aoa = optional_number(row.fields[2], row.line, "aoa");
    entry.concreteness = optional_number(row.fields[3], row.line, "concreteness");
    if (entry.aoa && *entry.aoa < 0.0) throw SchemaError("lexicon row " + std::to_string(row.line) + ": negative aoa");
    for (const auto& tag : split(trim(row.fields[4]), '|')) {
      if (trim(tag).empty()) continue;
      try {
        entry.pos_tags.push_back(parse_pos(tag));
      } catch (const ValidationError& e) {
        throw SchemaError("lexicon row " + std::to_string(row.line) + ": " + e.what());
      }
    }
    if (auto syl = optional_number(row.fields[5], row.line, "syllables")) {
      if (*syl < 1.0 || std::floor(*syl) != *syl) {
        throw SchemaError("lexicon row " + std::to_string(row.line) + ": syllables must be a positive integer");
      }
      entry.syllables = static_cast<int>(*syl);
    }
    ++local.rows;
    if (lex.entries_.count(entry.word)) ++local.duplicates;
    lex.insert(std::move(entry));
  }
  if (report) *report = local;
  return lex;
}

const LexiconEntry* Lexicon::lookup(std::string_view word) const {
  const auto it = entries_.find(to_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

void Lexicon::insert(LexiconEntry entry) {
  entry.word = to_lower(entry.word);
  std::string key = entry.word;
  entries_.insert_or_assign(std::move(key), std::move(entry));
}

namespace {
constexpr std::array<std::string_view, 11> kListNames = {
    "connectives_all",         "connectives_explicit", "connectives_causal", "connectives_logical",
    "connectives_temporal",    "connectives_additive", "pronouns_first_singular",
    "pronouns_second",         "intentional_verbs",    "be_forms",           "irregular_participles"};
}

std::string_view to_string(WordListName name) { return kListNames[static_cast<std::size_t>(name)]; }

WordListName parse_word_list_name(std::string_view text) {
  const std::string lower = to_lower(trim(text));
  for (std::size_t i = 0; i < kListNames.size(); ++i) {
    if (kListNames[i] == lower) return static_cast<WordListName>(i);
  }
  throw ValidationError("unknown word list '" + std::string(text) + "'");
}

const std::vector<WordListName>& all_word_list_names() {
  static const std::vector<WordListName> names = [] {
    std::vector<WordListName> out;
    for (std::size_t i = 0; i < kListNames.size(); ++i) out.push_back(static_cast<WordListName>(i));
    return out;
  }();
  return names;
}

WordList::WordList(WordListName name, const std::vector<std::string>& entries) : name_(name) {
  for (const auto& raw : entries) {
    std::string phrase = to_lower(normalize_space(raw));
    if (phrase.empty()) continue;
    longest_ = std::max(longest_, static_cast<std::size_t>(std::count(phrase.begin(), phrase.end(), ' ') + 1));
    entries_.insert(std::move(phrase));
  }
  if (entries_.empty()) throw ValidationError("word list '" + std::string(to_string(name)) + "' has no entries");
}

WordList WordList::load(const std::string& path) { return parse(read_file(path), path); }

WordList WordList::parse(std::string_view content, const std::string& origin) {
  std::optional<WordListName> name;
  std::vector<std::string> entries;
  for (const auto& raw_line : split(content, '\n')) {
    const std::string_view line = trim(raw_line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      if (starts_with(body, "name:")) name = parse_word_list_name(body.substr(5));
      continue;
    }
    entries.emplace_back(line);
  }
  if (!name) throw SchemaError("word list " + origin + " lacks a '# name: <list>' header");
  return WordList(*name, entries);
}

bool WordList::contains(std::string_view entry) const {
  return entries_.count(to_lower(normalize_space(entry))) > 0;
}

std::vector<PhraseMatch> match_phrases(const std::vector<std::string>& words, const WordList& list) {
  std::vector<PhraseMatch> matches;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t matched = 0;
    const std::size_t max_len = std::min(list.longest_phrase(), words.size() - i);
    for (std::size_t len = max_len; len >= 1; --len) {
      std::string phrase = words[i];
      for (std::size_t k = 1; k < len; ++k) {
        phrase += ' ';
        phrase += words[i + k];
      }
      if (list.contains(phrase)) {
        matched = len;
        break;
      }
    }
    if (matched) {
      matches.push_back({i, matched});
      i += matched;
    } else {
      ++i;
    }
  }
  return matches;
}

SegmentationRules SegmentationRules::load(const std::string& path) { return parse(read_file(path)); }

SegmentationRules SegmentationRules::parse(std::string_view content) {
  SegmentationRules rules;
  for (const auto& raw_line : split(content, '\n')) {
    const std::string_view line = trim(raw_line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      if (starts_with(body, "version:")) rules.version = std::string(trim(body.substr(8)));
      continue;
    }
    std::string abbr = to_lower(line);
    if (abbr.back() != '.') abbr.push_back('.');
    rules.abbreviations.insert(std::move(abbr));
  }
  return rules;
}

const WordList& LanguageResources::list(WordListName name) const {
  const auto it = lists.find(name);
  if (it == lists.end()) throw Error("word list not loaded: " + std::string(to_string(name)));
  return it->second;
}

namespace {

std::vector<std::string> data_lines(const std::string& path) {
  std::vector<std::string> out;
  for (const auto& raw : split(read_file(path), '\n')) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(line);
  }
  return out;
}

}  // namespace

LanguageResources load_resources(const std::string& data_dir, const std::string& lexicon_path) {
  namespace fs = std::filesystem;
  const fs::path root(data_dir);
  LanguageResources res;

  const std::string lex_path = lexicon_path.empty() ? (root / "lexicon" / "core_lexicon.csv").string() : lexicon_path;
  res.lexicon = Lexicon::load(lex_path);
  res.provenance["lexicon"] = file_fingerprint(lex_path);

  for (WordListName name : all_word_list_names()) {
    const auto path = (root / "wordlists" / (std::string(to_string(name)) + ".txt")).string();
    WordList list = WordList::load(path);
    if (list.name() != name) {
      throw SchemaError(path + " declares list '" + std::string(to_string(list.name())) + "'");
    }
    res.lists.emplace(name, std::move(list));
    res.provenance["wordlist:" + std::string(to_string(name))] = file_fingerprint(path);
  }

  const auto stop_path = (root / "stopwords.txt").string();
  for (auto& w : data_lines(stop_path)) res.stop_words.insert(to_lower(w));
  res.provenance["stopwords"] = file_fingerprint(stop_path);

  const auto lemma_path = (root / "lemmas.txt").string();
  for (const auto& line : data_lines(lemma_path)) {
    std::vector<std::string> parts;
    for (auto& p : split(normalize_space(line), ' ')) parts.push_back(std::move(p));
    if (parts.size() != 2 && parts.size() != 3) {
      throw SchemaError(lemma_path + ": expected 'form lemma [pos]', got '" + line + "'");
    }
    LanguageResources::IrregularForm form{to_lower(parts[1]), std::nullopt};
    if (parts.size() == 3) form.pos = parse_pos(parts[2]);
    res.irregular_lemmas[to_lower(parts[0])] = std::move(form);
  }
  res.provenance["lemmas"] = file_fingerprint(lemma_path);

  const auto seg_path = (root / "segmentation" / "abbreviations.txt").string();
  res.segmentation = SegmentationRules::load(seg_path);
  res.provenance["segmentation"] = file_fingerprint(seg_path);
  return res;
}

std::string resolve_data_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("PSYLING_DATA_DIR"); env && *env) return env;
  return PSYLING_DEFAULT_DATA_DIR;
}

}  // namespace psyling

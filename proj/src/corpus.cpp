#include "psyling/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace psyling {

std::string_view to_string(Topic topic) {
  switch (topic) {
    case Topic::glycolysis:
      return "glycolysis";
    case Topic::enzyme_kinetics:
      return "enzyme_kinetics";
    case Topic::other:
      return "other";
  }
  return "other";
}

Topic parse_topic(std::string_view text) {
  std::string t = to_lower(trim(text));
  std::replace(t.begin(), t.end(), ' ', '_');
  std::replace(t.begin(), t.end(), '-', '_');
  if (t == "glycolysis") return Topic::glycolysis;
  if (t == "enzyme_kinetics") return Topic::enzyme_kinetics;
  if (t == "other") return Topic::other;
  throw ValidationError("unknown topic '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Loading

CorpusFormat corpus_format_from_path(const std::string& path) {
  const std::string ext = to_lower(std::filesystem::path(path).extension().string());
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return CorpusFormat::jsonl;
  if (ext == ".csv") return CorpusFormat::csv;
  throw InvalidInput("cannot infer corpus format from '" + path + "'; use .jsonl or .csv");
}

std::vector<LabeledDocument> load_corpus(const std::string& path, CorpusFormat format) {
  return parse_corpus(read_file(path), format);
}

namespace {

LabeledDocument make_document(std::size_t line, const std::string& id, const std::string& label,
                              const std::string& topic, const std::string& text) {
  LabeledDocument doc;
  doc.id = std::string(trim(id));
  if (doc.id.empty()) throw SchemaError("record at line " + std::to_string(line) + ": empty id");
  try {
    doc.source_label = parse_source_label(label);
    doc.topic = parse_topic(topic);
  } catch (const ValidationError& e) {
    throw ValidationError("record at line " + std::to_string(line) + ": " + e.what());
  }
  doc.text = text;
  if (trim(doc.text).empty()) throw ValidationError("record at line " + std::to_string(line) + ": empty text");
  return doc;
}

constexpr const char* kFields[] = {"id", "source_label", "topic", "text"};

}  // namespace

std::vector<LabeledDocument> parse_corpus(std::string_view content, CorpusFormat format) {
  std::vector<LabeledDocument> docs;
  std::unordered_set<std::string> seen;
  auto add = [&](LabeledDocument doc, std::size_t line) {
    if (!seen.insert(doc.id).second) {
      throw ValidationError("record at line " + std::to_string(line) + ": duplicate id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  };

  if (format == CorpusFormat::jsonl) {
    std::size_t line_no = 0;
    for (const auto& line : split(content, '\n')) {
      ++line_no;
      if (trim(line).empty()) continue;
      nlohmann::json record;
      try {
        record = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("record at line " + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
      }
      if (!record.is_object()) throw SchemaError("record at line " + std::to_string(line_no) + ": not an object");
      std::string values[4];
      for (int f = 0; f < 4; ++f) {
        const auto it = record.find(kFields[f]);
        if (it == record.end() || it->is_null()) {
          throw SchemaError("record at line " + std::to_string(line_no) + ": missing field '" + kFields[f] + "'");
        }
        if (!it->is_string()) {
          throw SchemaError("record at line " + std::to_string(line_no) + ": field '" + kFields[f] +
                            "' must be a string");
        }
        values[f] = it->get<std::string>();
      }
      add(make_document(line_no, values[0], values[1], values[2], values[3]), line_no);
    }
    return docs;
  }

  const auto rows = parse_csv(content);
  if (rows.empty()) return docs;
  int column[4] = {-1, -1, -1, -1};
  const auto& header = rows.front().fields;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = to_lower(trim(header[c]));
    for (int f = 0; f < 4; ++f) {
      if (name == kFields[f]) column[f] = static_cast<int>(c);
    }
  }
  for (int f = 0; f < 4; ++f) {
    if (column[f] < 0) throw SchemaError(std::string("corpus CSV header lacks column '") + kFields[f] + "'");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::string values[4];
    for (int f = 0; f < 4; ++f) {
      const auto c = static_cast<std::size_t>(column[f]);
      if (c >= row.fields.size()) {
        throw SchemaError("record at line " + std::to_string(row.line) + ": missing field '" + kFields[f] + "'");
      }
      values[f] = row.fields[c];
    }
    add(make_document(row.line, values[0], values[1], values[2], values[3]), row.line);
  }
  return docs;
}

// ---------------------------------------------------------------------------
// Segmentation

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of a closing quote/bracket at pos, 0 if none. Handles UTF-8 ’ and ”.
std::size_t closer_length(std::string_view text, std::size_t pos) {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
  if (text.substr(pos, 3) == "\xE2\x80\x99" || text.substr(pos, 3) == "\xE2\x80\x9D") return 3;
  return 0;
}

std::size_t opener_length(std::string_view text, std::size_t pos) {
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == '(' || c == '[') return 1;
  if (text.substr(pos, 3) == "\xE2\x80\x98" || text.substr(pos, 3) == "\xE2\x80\x9C") return 3;
  return 0;
}

bool is_abbreviation(std::string_view text, std::size_t period, const SegmentationRules& rules) {
  std::size_t b = period;
  while (b > 0 && !is_space(text[b - 1])) --b;
  while (b < period && opener_length(text, b)) b += opener_length(text, b);
  if (b == period) return false;
  const std::string word = to_lower(text.substr(b, period - b + 1));
  if (rules.abbreviations.count(word)) return true;
  // Single-letter initials such as "J. Smith".
  return word.size() == 2 && is_alpha(word[0]);
}

}  // namespace

std::vector<Sentence> segment_sentences(const LabeledDocument& doc, const SegmentationRules& rules) {
  const std::string_view text = doc.text;
  std::vector<std::size_t> starts = {0};
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    const bool lone_period = (j - i == 1) && c == '.';
    while (j < text.size() && closer_length(text, j)) j += closer_length(text, j);
    std::size_t k = j;
    while (k < text.size() && is_space(text[k])) ++k;

    if (k < text.size() && k > j) {
      std::size_t m = k;
      while (m < text.size() && opener_length(text, m)) m += opener_length(text, m);
      const bool capital_follows = m < text.size() && is_upper(text[m]);
      if (capital_follows && !(lone_period && is_abbreviation(text, i, rules))) starts.push_back(k);
    }
    i = j;
  }

  std::vector<Sentence> sentences;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Sentence sentence;
    sentence.doc_id = doc.id;
    sentence.index = s;
    sentence.begin = starts[s];
    sentence.end = s + 1 < starts.size() ? starts[s + 1] : text.size();
    sentence.text = std::string(trim(text.substr(sentence.begin, sentence.end - sentence.begin)));
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

// ---------------------------------------------------------------------------
// Tokenization

namespace {

// Maps typographic punctuation to ASCII so the tokenizer only sees bytes it
// understands. Other non-ASCII bytes are kept and treated as letters.
std::string ascii_punctuation(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (static_cast<unsigned char>(text[i]) == 0xE2 && i + 2 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0x80) {
      const auto third = static_cast<unsigned char>(text[i + 2]);
      char replacement = 0;
      if (third == 0x98 || third == 0x99) replacement = '\'';
      else if (third == 0x9C || third == 0x9D) replacement = '"';
      else if (third == 0x93 || third == 0x94) replacement = '-';
      else if (third == 0xA6) replacement = '.';
      if (replacement) {
        out.push_back(replacement);
        i += 2;
        continue;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

bool is_word_byte(char c) { return is_alpha(c) || is_digit(c) || static_cast<unsigned char>(c) >= 0x80; }

int count_letters(std::string_view word) {
  int n = 0;
  for (char c : word) {
    const auto u = static_cast<unsigned char>(c);
    if (is_alpha(c) || u >= 0xC0) ++n;  // UTF-8 lead bytes count once per character
  }
  return n;
}

bool all_digits(std::string_view word) {
  bool any = false;
  for (char c : word) {
    if (is_digit(c)) any = true;
    else if (c != '.' && c != ',') return false;
  }
  return any;
}

}  // namespace

std::vector<Token> tokenize(std::string_view raw) {
  const std::string text = ascii_punctuation(raw);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    Token token;
    if (is_word_byte(c)) {
      std::size_t j = i + 1;
      while (j < text.size()) {
        if (is_word_byte(text[j])) {
          ++j;
        } else if ((text[j] == '\'' || text[j] == '-') && j + 1 < text.size() && is_word_byte(text[j + 1])) {
          j += 2;
        } else if ((text[j] == '.' || text[j] == ',') && is_digit(text[j - 1]) && j + 1 < text.size() &&
                   is_digit(text[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      token.surface = text.substr(i, j - i);
      token.pos = all_digits(token.surface) ? Pos::number : Pos::other;
      i = j;
    } else {
      token.surface = std::string(1, c);
      token.pos = Pos::punctuation;
      ++i;
    }
    token.lower = to_lower(token.surface);
    token.lemma = token.lower;
    tokens.push_back(std::move(token));
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Annotation

namespace {

bool is_content_pos(Pos pos) {
  return pos == Pos::noun || pos == Pos::verb || pos == Pos::adjective || pos == Pos::adverb;
}

bool is_closed_class(Pos pos) {
  return pos == Pos::pronoun || pos == Pos::determiner || pos == Pos::preposition || pos == Pos::conjunction ||
         pos == Pos::particle;
}

const std::unordered_set<std::string>& modal_verbs() {
  static const std::unordered_set<std::string> modals = {"can",   "could", "will", "would", "shall",
                                                         "should", "may",  "might", "must"};
  return modals;
}

struct Analysis {
  std::string lemma;
  std::vector<Pos> candidates;  // preference order
  bool known = false;
};

std::vector<Pos> compatible(const LexiconEntry& entry, const std::vector<Pos>& allowed) {
  std::vector<Pos> out;
  for (Pos p : entry.pos_tags) {
    if (std::find(allowed.begin(), allowed.end(), p) != allowed.end()) out.push_back(p);
  }
  return out;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Stem candidates for a suffix, e.g. "running" -> "runn", "run", "rune".
std::vector<std::string> stems(const std::string& word, std::string_view suffix, std::string_view replacement) {
  std::vector<std::string> out;
  if (word.size() <= suffix.size() + 1 || !ends_with(word, suffix)) return out;
  const std::string base = word.substr(0, word.size() - suffix.size());
  out.push_back(base + std::string(replacement));
  if (replacement.empty()) {
    out.push_back(base + "e");
    if (base.size() >= 3 && base[base.size() - 1] == base[base.size() - 2] && !is_vowel(base.back())) {
      out.push_back(base.substr(0, base.size() - 1));
    }
  }
  return out;
}

// Suffix rules tried in order; the first stem found in the lexicon with a
// compatible tag wins.
struct SuffixRule {
  std::string_view suffix;
  std::string_view replacement;
  std::vector<Pos> tags;
};

const std::vector<SuffixRule>& suffix_rules() {
  static const std::vector<SuffixRule> rules = {
      {"ies", "y", {Pos::noun, Pos::verb}},
      {"ied", "y", {Pos::verb}},
      {"es", "", {Pos::noun, Pos::verb}},
      {"s", "", {Pos::noun, Pos::verb}},
      {"ing", "", {Pos::verb}},
      {"ed", "", {Pos::verb}},
      {"ier", "y", {Pos::adjective}},
      {"iest", "y", {Pos::adjective}},
      {"er", "", {Pos::adjective}},
      {"est", "", {Pos::adjective}},
  };
  return rules;
}

// Out-of-lexicon lemma by plain suffix stripping.
std::string heuristic_lemma(const std::string& w) {
  if (w.size() > 4 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 4 && ends_with(w, "ied")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 4 && ends_with(w, "sses")) return w.substr(0, w.size() - 2);
  if (w.size() > 5 && ends_with(w, "ing")) return w.substr(0, w.size() - 3);
  if (w.size() > 4 && ends_with(w, "ed")) return w.substr(0, w.size() - 2);
  if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

Pos heuristic_pos(const std::string& w, bool capitalized_mid_sentence) {
  if (capitalized_mid_sentence) return Pos::noun;
  for (std::string_view s : {"ly"}) {
    if (w.size() > 4 && ends_with(w, s)) return Pos::adverb;
  }
  for (std::string_view s : {"ing", "ed", "ize", "ise", "ify", "ate"}) {
    if (w.size() > s.size() + 2 && ends_with(w, s)) return Pos::verb;
  }
  for (std::string_view s : {"ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ish", "ary"}) {
    if (w.size() > s.size() + 2 && ends_with(w, s)) return Pos::adjective;
  }
  return Pos::noun;
}

Analysis analyze(const std::string& lower, const LanguageResources& res) {
  Analysis a;
  const auto& lex = res.lexicon;

  if (const auto it = res.irregular_lemmas.find(lower); it != res.irregular_lemmas.end()) {
    a.lemma = it->second.lemma;
    a.known = true;
    if (it->second.pos) a.candidates = {*it->second.pos};
    else if (const auto* entry = lex.lookup(lower)) a.candidates = entry->pos_tags;
    else if (const auto* base = lex.lookup(a.lemma)) a.candidates = base->pos_tags;
    return a;
  }
  if (const auto* entry = lex.lookup(lower)) {
    a.lemma = lower;
    a.candidates = entry->pos_tags;
    a.known = true;
    return a;
  }
  for (const auto& rule : suffix_rules()) {
    for (const auto& stem : stems(lower, rule.suffix, rule.replacement)) {
      if (const auto* entry = lex.lookup(stem)) {
        auto tags = compatible(*entry, rule.tags);
        if (tags.empty()) continue;
        a.lemma = stem;
        a.candidates = std::move(tags);
        a.known = true;
        return a;
      }
    }
  }
  // Possessives and unlisted contractions: analyze the part before the apostrophe.
  if (const auto apos = lower.find('\''); apos != std::string::npos && apos > 0) {
    Analysis base = analyze(lower.substr(0, apos), res);
    return base;
  }
  a.lemma = heuristic_lemma(lower);
  return a;
}

Pos choose_pos(const std::vector<Pos>& candidates, const Token* prev) {
  if (candidates.size() == 1 || !prev) return candidates.front();
  auto has = [&](Pos p) { return std::find(candidates.begin(), candidates.end(), p) != candidates.end(); };
  const Pos pp = prev->pos;
  if (prev->lower == "to" || modal_verbs().count(prev->lower) || pp == Pos::pronoun) {
    if (has(Pos::verb)) return Pos::verb;
  }
  if (pp == Pos::determiner || pp == Pos::adjective || pp == Pos::number || pp == Pos::preposition) {
    if (has(Pos::noun)) return Pos::noun;
    if (has(Pos::adjective)) return Pos::adjective;
  }
  if (pp == Pos::noun && has(Pos::verb)) return Pos::verb;
  if (pp == Pos::verb || pp == Pos::adverb) {
    if (has(Pos::adjective) && pp == Pos::verb && prev->lemma == "be") return Pos::adjective;
  }
  return candidates.front();
}

}  // namespace

Sentence tokenize_and_annotate(Sentence sentence, const LanguageResources& res) {
  sentence.tokens = tokenize(sentence.text);
  const Token* prev = nullptr;
  bool first_word = true;
  for (auto& token : sentence.tokens) {
    if (token.pos == Pos::punctuation) {
      token.letters = 0;
      token.syllables = 0;
      token.in_lexicon = true;
      continue;
    }
    token.letters = count_letters(token.surface);
    if (token.pos == Pos::number) {
      token.syllables = 1;
      token.in_lexicon = true;
    } else {
      Analysis a = analyze(token.lower, res);
      token.lemma = a.lemma;
      token.in_lexicon = a.known;
      if (!a.candidates.empty()) {
        token.pos = choose_pos(a.candidates, prev);
      } else {
        token.pos = heuristic_pos(token.lower, !first_word && is_upper(token.surface.front()));
      }
      token.syllables = token.letters > 0 ? count_syllables(token.lower, &res.lexicon) : 1;
    }
    token.is_content = is_content_pos(token.pos) && !res.is_stop_word(token.lower);
    prev = &token;
    first_word = false;
  }
  return sentence;
}

int heuristic_syllables(std::string_view word) {
  std::string letters;
  for (char c : word) {
    if (is_alpha(c)) letters.push_back(static_cast<char>(c | 0x20));
  }
  if (letters.empty()) throw InvalidInput("count_syllables: '" + std::string(word) + "' has no letters");
  auto vowel = [](char c) { return is_vowel(c) || c == 'y'; };
  int groups = 0;
  bool in_group = false;
  for (char c : letters) {
    if (vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  const std::size_t n = letters.size();
  if (groups > 1 && letters[n - 1] == 'e' && !vowel(letters[n - 2])) {
    // "-le" after a consonant keeps its syllable (ta-ble).
    const bool consonant_le = n >= 3 && letters[n - 2] == 'l' && !vowel(letters[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

int count_syllables(std::string_view word, const Lexicon* lexicon) {
  if (lexicon) {
    if (const auto* entry = lexicon->lookup(word); entry && entry->syllables) {
      bool has_letter = std::any_of(word.begin(), word.end(), [](char c) { return is_alpha(c); });
      if (!has_letter) throw InvalidInput("count_syllables: '" + std::string(word) + "' has no letters");
      return *entry->syllables;
    }
  }
  return heuristic_syllables(word);
}

// ---------------------------------------------------------------------------
// Summary

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

std::map<SourceLabel, LabelSummary> corpus_summary(const std::vector<LabeledDocument>& docs,
                                                   const SegmentationRules& rules) {
  if (docs.empty()) throw InvalidInput("corpus_summary: empty corpus");
  std::map<SourceLabel, std::vector<double>> per_doc;
  std::map<SourceLabel, std::vector<double>> per_sentence;
  for (const auto& doc : docs) {
    const auto sentences = segment_sentences(doc, rules);
    per_doc[doc.source_label].push_back(static_cast<double>(sentences.size()));
    for (const auto& s : sentences) {
      const auto tokens = tokenize(s.text);
      const auto words = std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word(); });
      per_sentence[doc.source_label].push_back(static_cast<double>(words));
    }
  }
  std::map<SourceLabel, LabelSummary> out;
  for (const auto& [label, counts] : per_doc) {
    LabelSummary& summary = out[label];
    summary.documents = counts.size();
    summary.sentences = per_sentence[label].size();
    summary.sentences_per_document = mean_sd(counts);
    summary.words_per_sentence = mean_sd(per_sentence[label]);
  }
  return out;
}

}  // namespace psyling

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace psyling {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input record is missing a required field or has the wrong shape.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Field present but its value is outside the accepted domain.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument failed.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The data are too degenerate for the statistic (zero variance, singular system, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

enum class SourceLabel { human, llm };

std::string_view to_string(SourceLabel label);
SourceLabel parse_source_label(std::string_view text);

/// Ridge encoding: human = +1, llm = -1.
inline double encode_label(SourceLabel label) { return label == SourceLabel::human ? 1.0 : -1.0; }

enum class Pos {
  noun,
  verb,
  adjective,
  adverb,
  pronoun,
  determiner,
  preposition,
  conjunction,
  particle,
  number,
  punctuation,
  other
};

std::string_view to_string(Pos pos);
Pos parse_pos(std::string_view text);

// ---------------------------------------------------------------------------
// Random numbers. std::mt19937_64 is fully specified by the standard, but the
// std distributions are not, so bounded draws are done here.

/// Stable 64-bit hash (FNV-1a) used for seeds and file fingerprints.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// Mixes a base seed with a key so parallel work gets independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1).
  double uniform();
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Strings

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);
bool starts_with(std::string_view text, std::string_view prefix);
bool ends_with(std::string_view text, std::string_view suffix);
std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
/// Collapses runs of whitespace to one space and trims.
std::string normalize_space(std::string_view text);
/// Shortest representation that round-trips through strtod.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string read_file(const std::string& path);
/// Hex fingerprint of a file's bytes, used for provenance in reports.
std::string file_fingerprint(const std::string& path);

// ---------------------------------------------------------------------------
// CSV (RFC 4180 quoting, LF or CRLF).

struct CsvRow {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
};

std::vector<CsvRow> parse_csv(std::string_view content);
std::string csv_escape(std::string_view field);

}  // namespace psyling

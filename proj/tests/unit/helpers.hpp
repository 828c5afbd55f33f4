#pragma once

#include <string>
#include <vector>

#include "psyling/corpus.hpp"
#include "psyling/features.hpp"
#include "psyling/lexicon.hpp"

namespace psyling::testsupport {

inline const LanguageResources& resources() {
  static const LanguageResources res = load_resources(resolve_data_dir());
  return res;
}

inline TextUnit unit_from(const std::string& text, const std::string& id = "u",
                          SourceLabel label = SourceLabel::human) {
  LabeledDocument doc{id, label, Topic::other, text};
  return build_units({doc}, resources(), Granularity::document).at(0);
}

inline std::vector<Token> tokens_of(const TextUnit& unit) {
  std::vector<Token> out;
  for (const auto& s : unit.sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

inline std::string data_file(const std::string& name) { return std::string(PSYLING_TEST_DATA_DIR) + "/" + name; }

}  // namespace psyling::testsupport

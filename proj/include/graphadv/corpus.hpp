#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace graphadv {

/// Word lists used by the dictionary-style generators.
struct WordCorpus {
  std::vector<std::string> dictionary;
  std::vector<std::string> web_terms;
  std::vector<std::string> domain_tokens;
};

/// Directory holding the bundled word lists. GRAPHADV_DATA_DIR in the
/// environment overrides the build-time location.
std::filesystem::path data_dir();

std::vector<std::string> read_word_list(const std::filesystem::path& path);

/// Loads (once) and returns the bundled corpora.
const WordCorpus& bundled_corpus();

}  // namespace graphadv

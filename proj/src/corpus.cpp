#include "graphadv/corpus.hpp"

#include <cstdlib>
#include <fstream>

#include "graphadv/errors.hpp"

namespace graphadv {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("GRAPHADV_DATA_DIR"); env && *env) return env;
  return GRAPHADV_DATA_DIR;
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word list " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.push_back(line);
  }
  return words;
}

const WordCorpus& bundled_corpus() {
  static const WordCorpus corpus = [] {
    auto dir = data_dir();
    WordCorpus c;
    c.dictionary = read_word_list(dir / "words.txt");
    c.web_terms = read_word_list(dir / "webterms.txt");
    c.domain_tokens = read_word_list(dir / "domaintokens.txt");
    return c;
  }();
  return corpus;
}

}  // namespace graphadv

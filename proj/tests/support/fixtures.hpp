#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "synthetic.hpp"

namespace xling::testing {

inline std::string join(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

// Writes a cipher corpus as aligned jsonl; couple i gets group key
// 2012-(i % months + 1).
inline void write_corpus(const ParallelCorpus& corpus, const std::filesystem::path& path,
                         std::size_t months = 0) {
  std::ofstream out(path, std::ios::binary);
  for (std::size_t i = 0; i < corpus.ids.size(); ++i) {
    nlohmann::ordered_json j = {{"src_id", "en-" + corpus.ids[i]},
                                {"tgt_id", "ar-" + corpus.ids[i]},
                                {"src_text", join(corpus.source[i])},
                                {"tgt_text", join(corpus.target[i])}};
    if (months > 0) {
      char key[32];
      std::snprintf(key, sizeof(key), "2012-%02zu-15", i % months + 1);
      j["group_key"] = key;
    }
    out << j.dump() << '\n';
  }
}

inline ParallelCorpus small_cipher_corpus(std::size_t documents, std::uint64_t seed = 21) {
  const Lexicon lexicon({.topics = 8, .words_per_topic = 20, .general_words = 80});
  DocumentShape shape;
  shape.min_length = 30;
  shape.max_length = 60;
  return cipher_corpus(lexicon, shape, documents, seed);
}

}  // namespace xling::testing

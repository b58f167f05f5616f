#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "xling/bidict.hpp"

namespace xling::textprep {

struct Token {
  std::string surface;
  std::string reduced;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class ReducerKind { kIdentity, kSuffixStemmer, kLemmaTable, kLightStemmer, kRooter, kMorphAr };

ReducerKind parse_reducer_kind(std::string_view name);
std::string_view reducer_kind_name(ReducerKind kind) noexcept;

// Number of code points in a UTF-8 string (invalid bytes count as one each).
std::size_t utf8_length(std::string_view text);

// Maximal runs of letters and digits; punctuation, symbols and whitespace
// separate tokens. Arabic diacritics and tatweel are dropped inside words.
// `reduced` is initialised to `surface`.
std::vector<Token> tokenize(std::string_view text, bool lowercase = true);

// Word list file: UTF-8, one entry per line, '#' starts a comment line.
std::vector<std::string> read_word_list(std::istream& in);
std::vector<std::string> load_word_list(const std::filesystem::path& path);

// English suffix stripping. Rules are applied until none matches, so the
// result is a fixed point of the rule set.
class SuffixStemmer {
 public:
  struct Rule {
    std::string suffix;
    std::string replacement;
    std::size_t min_stem;  // code points left before the replacement is appended
    bool undouble = false;  // drop a doubled final consonant after stripping
    std::string blocked_before;  // rule skipped if the stem ends in one of these bytes
  };

  SuffixStemmer();
  explicit SuffixStemmer(std::vector<Rule> rules) : rules_(std::move(rules)) {}

  std::string reduce(std::string_view word) const;

 private:
  bool apply_once(std::string& word) const;

  std::vector<Rule> rules_;
};

// Exception table (irregular forms) with suffix stemmer fallback.
class LemmaTable {
 public:
  LemmaTable();  // small built-in table of English irregular forms
  explicit LemmaTable(std::unordered_map<std::string, std::string> table,
                      SuffixStemmer fallback = {});

  // File format: `form<TAB>lemma` per line, '#' comments.
  static LemmaTable load(const std::filesystem::path& path);

  std::string reduce(std::string_view word) const;

 private:
  std::unordered_map<std::string, std::string> table_;
  SuffixStemmer fallback_;
};

// Longest-match prefix then suffix stripping, repeated to a fixed point.
// Nothing is stripped if fewer than `min_stem` code points would remain.
class LightStemmer {
 public:
  LightStemmer();  // Arabic defaults
  LightStemmer(std::vector<std::string> prefixes, std::vector<std::string> suffixes,
               std::size_t min_stem = 3);

  static LightStemmer load(const std::filesystem::path& prefix_file,
                           const std::filesystem::path& suffix_file, std::size_t min_stem = 3);

  std::string reduce(std::string_view word) const;

 private:
  bool strip_prefix(std::string& word) const;
  bool strip_suffix(std::string& word) const;

  std::vector<std::string> prefixes_;  // sorted longest first
  std::vector<std::string> suffixes_;
  std::size_t min_stem_;
};

// Simplified Arabic root extraction: light stem, then remove interior long
// vowels and derivational prefixes while more than three letters remain.
// A stand-in for full rooting; plug in another Reducer for accuracy.
class Rooter {
 public:
  Rooter() = default;
  explicit Rooter(LightStemmer light) : light_(std::move(light)) {}

  std::string reduce(std::string_view word) const;
  const LightStemmer& light() const noexcept { return light_; }

 private:
  LightStemmer light_;
};

// Translations of `word` looked up on `side` of the dictionary: the light
// stem's translations if the stem is an entry, else the root's (possibly none).
std::set<std::string> morphar_lookup(std::string_view word, const bidict::BilingualDictionary& dict,
                                     const LightStemmer& light, const Rooter& root,
                                     bidict::Side side = bidict::Side::kTarget);

struct ReducerResources {
  SuffixStemmer stemmer;
  LemmaTable lemmas;
  LightStemmer light;
  Rooter rooter;
};

// A word reducer of a given kind. kMorphAr reduces to whichever of the light
// stem or the root the dictionary knows (light stem first), falling back to
// the light stem; it requires a dictionary.
class Reducer {
 public:
  Reducer() : Reducer(ReducerKind::kIdentity) {}
  explicit Reducer(ReducerKind kind, std::shared_ptr<const ReducerResources> resources = nullptr,
                   const bidict::BilingualDictionary* dict = nullptr,
                   bidict::Side side = bidict::Side::kTarget);

  ReducerKind kind() const noexcept { return kind_; }
  std::string reduce(std::string_view word) const;

 private:
  ReducerKind kind_;
  std::shared_ptr<const ReducerResources> resources_;
  const bidict::BilingualDictionary* dict_;
  bidict::Side side_;
};

struct PipelineConfig {
  bool lowercase = true;
  std::unordered_set<std::string> stopwords;
  std::size_t min_corpus_frequency = 1;
  ReducerKind reducer_source = ReducerKind::kIdentity;
  ReducerKind reducer_target = ReducerKind::kIdentity;

  void validate() const;
};

using TermCounts = std::unordered_map<std::string, std::size_t>;

// Total occurrences of each reduced term over the corpus.
TermCounts count_terms(const std::vector<std::vector<Token>>& docs);

// Drops stopwords (matched on surface or reduced form) and tokens whose
// reduced form occurs fewer than min_corpus_frequency times in `counts`.
std::vector<std::vector<Token>> apply_filters(std::vector<std::vector<Token>> docs,
                                              const PipelineConfig& config,
                                              const TermCounts& counts);

// Per-language document analysis: tokenize, drop stopwords, reduce.
class Pipeline {
 public:
  Pipeline() = default;
  Pipeline(bool lowercase, std::unordered_set<std::string> stopwords, Reducer reducer);

  std::vector<Token> analyze(std::string_view text) const;
  std::vector<std::string> terms(std::string_view text) const;

 private:
  bool lowercase_ = true;
  std::unordered_set<std::string> stopwords_;
  Reducer reducer_;
};

// Analyzes every text, then removes terms rarer than `min_corpus_frequency`
// across the collection.
std::vector<std::vector<std::string>> analyze_corpus(const Pipeline& pipeline,
                                                     const std::vector<std::string>& texts,
                                                     std::size_t min_corpus_frequency);

}  // namespace xling::textprep

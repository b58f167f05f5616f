#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace xling::vsm {
class Vocabulary;
}

namespace xling::bidict {

enum class Side { kSource = 0, kTarget = 1 };

constexpr Side opposite(Side side) noexcept {
  return side == Side::kSource ? Side::kTarget : Side::kSource;
}

// A translation unit: every source term translates to every target term.
struct Synset {
  std::vector<std::string> source;  // sorted, unique
  std::vector<std::string> target;

  friend bool operator==(const Synset&, const Synset&) = default;
};

class BilingualDictionary {
 public:
  // TSV: `src1|src2<TAB>tgt1|tgt2` per line; blank and '#' lines ignored.
  static BilingualDictionary read(std::istream& in);
  static BilingualDictionary load(const std::filesystem::path& path);

  // Adds a synset unless an identical one is already present.
  void add_synset(std::vector<std::string> source, std::vector<std::string> target);

  const std::vector<Synset>& synsets() const noexcept { return synsets_; }
  bool empty() const noexcept { return synsets_.empty(); }

  bool contains(std::string_view term, Side side) const;
  std::span<const std::uint32_t> synsets_of(std::string_view term, Side side) const;

  // Union of the opposite side over every synset containing `term`.
  std::set<std::string> translations(std::string_view term, Side side) const;
  bool translates(std::string_view source_term, std::string_view target_term) const;

  // Distinct (source, target) term pairs sharing a synset, sorted.
  std::vector<std::pair<std::string, std::string>> translation_pairs() const;

  std::size_t vocabulary_size(Side side) const noexcept { return index_[index(side)].size(); }

 private:
  static constexpr std::size_t index(Side side) noexcept { return static_cast<std::size_t>(side); }

  std::vector<Synset> synsets_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> index_[2];
  std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> seen_;
};

// Word-level view of a document pair, used by the OOV and matching rates.
struct MatchReport {
  std::size_t matched = 0;  // maximum one-to-one matching of translated term types
  std::size_t oov_source = 0;
  std::size_t oov_target = 0;
  std::size_t size_source = 0;  // token counts
  std::size_t size_target = 0;
};

using Terms = std::span<const std::string>;

// 1 iff a translation of `word` (looked up on `side`) occurs in `other`.
int trans(std::string_view word, Terms other, const BilingualDictionary& dict,
          Side side = Side::kSource);

// Fraction of the distinct in-dictionary terms of `from` whose translation
// occurs in `to`; `from` is read on `side`. 0 when no term is in the dictionary.
double bin_measure(Terms from, Terms to, const BilingualDictionary& dict,
                   Side side = Side::kSource);

// Mean of both directed binary measures.
double bin_symmetric(Terms source, Terms target, const BilingualDictionary& dict);

// Alternative pooled form: translated tokens of both sides over the summed sizes.
double bin_pooled(Terms source, Terms target, const BilingualDictionary& dict);

// Cosine between tfidf vectors with one attribute per translation pair.
// Term weights come from the per-side vocabularies; absent terms weigh 0.
double dict_cosine(Terms source, Terms target, const BilingualDictionary& dict,
                   const vsm::Vocabulary& source_stats, const vsm::Vocabulary& target_stats);

MatchReport match_report(Terms source, Terms target, const BilingualDictionary& dict);

// Throws undefined-rate if either document is empty.
double oov_rate(Terms source, Terms target, const BilingualDictionary& dict);

// Matched pairs over |d_s| + |d_t|; throws undefined-rate if both are empty.
double matching_rate(Terms source, Terms target, const BilingualDictionary& dict);

}  // namespace xling::bidict

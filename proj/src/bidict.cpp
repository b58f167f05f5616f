#include "xling/bidict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <unordered_set>

#include "xling/error.hpp"
#include "xling/vsm.hpp"

namespace xling::bidict {

namespace {

std::vector<std::string> split_terms(std::string_view field) {
  std::vector<std::string> terms;
  std::size_t start = 0;
  while (start <= field.size()) {
    auto end = field.find('|', start);
    if (end == std::string_view::npos) end = field.size();
    std::string_view term = field.substr(start, end - start);
    while (!term.empty() && (term.front() == ' ')) term.remove_prefix(1);
    while (!term.empty() && (term.back() == ' ' || term.back() == '\r')) term.remove_suffix(1);
    if (!term.empty()) terms.emplace_back(term);
    start = end + 1;
  }
  return terms;
}

void sort_unique(std::vector<std::string>& terms) {
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
}

using Bag = std::unordered_set<std::string_view>;

Bag make_bag(Terms terms) { return Bag(terms.begin(), terms.end()); }

std::vector<std::string_view> distinct(Terms terms) {
  std::vector<std::string_view> out(terms.begin(), terms.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool has_translation_in(std::string_view word, const Bag& other, const BilingualDictionary& dict,
                        Side side) {
  const auto& synsets = dict.synsets();
  for (const auto id : dict.synsets_of(word, side)) {
    const Synset& synset = synsets[id];
    const auto& members = side == Side::kSource ? synset.target : synset.source;
    for (const auto& member : members) {
      if (other.contains(member)) return true;
    }
  }
  return false;
}

std::map<std::string_view, std::uint64_t> term_frequencies(Terms terms) {
  std::map<std::string_view, std::uint64_t> tf;
  for (const auto& t : terms) ++tf[t];
  return tf;
}

double term_weight(std::string_view term, std::uint64_t tf, const vsm::Vocabulary& stats) {
  const auto index = stats.index_of(std::string(term));
  if (!index) return 0.0;
  return vsm::tfidf_weight(tf, stats.df(*index), stats.document_count());
}

// Kuhn's augmenting-path maximum bipartite matching.
class BipartiteMatcher {
 public:
  explicit BipartiteMatcher(std::vector<std::vector<std::size_t>> adjacency, std::size_t right_size)
      : adjacency_(std::move(adjacency)), match_right_(right_size, kNone) {}

  std::size_t solve() {
    std::size_t matched = 0;
    for (std::size_t left = 0; left < adjacency_.size(); ++left) {
      visited_.assign(match_right_.size(), false);
      if (augment(left)) ++matched;
    }
    return matched;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool augment(std::size_t left) {
    for (const auto right : adjacency_[left]) {
      if (visited_[right]) continue;
      visited_[right] = true;
      if (match_right_[right] == kNone || augment(match_right_[right])) {
        match_right_[right] = left;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::size_t> match_right_;
  std::vector<bool> visited_;
};

}  // namespace

BilingualDictionary BilingualDictionary::read(std::istream& in) {
  BilingualDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw RecordError(ErrorCode::kMalformedRecord, line_no,
                        "expected exactly one TAB between source and target terms");
    }
    auto source = split_terms(std::string_view(line).substr(0, tab));
    auto target = split_terms(std::string_view(line).substr(tab + 1));
    if (source.empty() || target.empty()) {
      throw RecordError(ErrorCode::kMalformedRecord, line_no, "synset side is empty");
    }
    dict.add_synset(std::move(source), std::move(target));
  }
  return dict;
}

BilingualDictionary BilingualDictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read(in);
}

void BilingualDictionary::add_synset(std::vector<std::string> source,
                                     std::vector<std::string> target) {
  sort_unique(source);
  sort_unique(target);
  if (source.empty() || target.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "synset sides must be non-empty");
  }
  if (!seen_.emplace(source, target).second) return;
  const auto id = static_cast<std::uint32_t>(synsets_.size());
  for (const auto& term : source) index_[index(Side::kSource)][term].push_back(id);
  for (const auto& term : target) index_[index(Side::kTarget)][term].push_back(id);
  synsets_.push_back({std::move(source), std::move(target)});
}

bool BilingualDictionary::contains(std::string_view term, Side side) const {
  return index_[index(side)].contains(std::string(term));
}

std::span<const std::uint32_t> BilingualDictionary::synsets_of(std::string_view term,
                                                               Side side) const {
  const auto& idx = index_[index(side)];
  auto it = idx.find(std::string(term));
  if (it == idx.end()) return {};
  return it->second;
}

std::set<std::string> BilingualDictionary::translations(std::string_view term, Side side) const {
  std::set<std::string> out;
  for (const auto id : synsets_of(term, side)) {
    const auto& members = side == Side::kSource ? synsets_[id].target : synsets_[id].source;
    out.insert(members.begin(), members.end());
  }
  return out;
}

bool BilingualDictionary::translates(std::string_view source_term,
                                     std::string_view target_term) const {
  const auto a = synsets_of(source_term, Side::kSource);
  const auto b = synsets_of(target_term, Side::kTarget);
  // Synset id lists are built in increasing order.
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

std::vector<std::pair<std::string, std::string>> BilingualDictionary::translation_pairs() const {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& synset : synsets_) {
    for (const auto& s : synset.source) {
      for (const auto& t : synset.target) pairs.emplace(s, t);
    }
  }
  return {pairs.begin(), pairs.end()};
}

int trans(std::string_view word, Terms other, const BilingualDictionary& dict, Side side) {
  return has_translation_in(word, make_bag(other), dict, side) ? 1 : 0;
}

double bin_measure(Terms from, Terms to, const BilingualDictionary& dict, Side side) {
  const Bag bag = make_bag(to);
  std::size_t in_vocab = 0;
  std::size_t translated = 0;
  for (const auto word : distinct(from)) {
    if (!dict.contains(word, side)) continue;
    ++in_vocab;
    if (has_translation_in(word, bag, dict, side)) ++translated;
  }
  if (in_vocab == 0) return 0.0;
  return static_cast<double>(translated) / static_cast<double>(in_vocab);
}

double bin_symmetric(Terms source, Terms target, const BilingualDictionary& dict) {
  return (bin_measure(source, target, dict, Side::kSource) +
          bin_measure(target, source, dict, Side::kTarget)) /
         2.0;
}

double bin_pooled(Terms source, Terms target, const BilingualDictionary& dict) {
  if (source.empty() && target.empty()) return 0.0;
  const Bag source_bag = make_bag(source);
  const Bag target_bag = make_bag(target);
  std::size_t hits = 0;
  for (const auto& w : source) hits += has_translation_in(w, target_bag, dict, Side::kSource);
  for (const auto& w : target) hits += has_translation_in(w, source_bag, dict, Side::kTarget);
  return static_cast<double>(hits) / static_cast<double>(source.size() + target.size());
}

double dict_cosine(Terms source, Terms target, const BilingualDictionary& dict,
                   const vsm::Vocabulary& source_stats, const vsm::Vocabulary& target_stats) {
  std::map<std::string_view, double> target_weights;
  for (const auto& [term, tf] : term_frequencies(target)) {
    const double w = term_weight(term, tf, target_stats);
    if (w != 0.0) target_weights.emplace(term, w);
  }

  // Each distinct (w_s, w_t) translation pair is one attribute.
  double dot = 0.0;
  double source_sq = 0.0;
  double target_sq = 0.0;
  for (const auto& [term, tf] : term_frequencies(source)) {
    const double w = term_weight(term, tf, source_stats);
    if (w == 0.0) continue;
    const auto translations = dict.translations(term, Side::kSource);
    source_sq += w * w * static_cast<double>(translations.size());
    for (const auto& t : translations) {
      if (auto it = target_weights.find(t); it != target_weights.end()) dot += w * it->second;
    }
  }
  for (const auto& [term, w] : target_weights) {
    target_sq += w * w * static_cast<double>(dict.translations(term, Side::kTarget).size());
  }
  if (source_sq == 0.0 || target_sq == 0.0) return 0.0;
  return dot / (std::sqrt(source_sq) * std::sqrt(target_sq));
}

MatchReport match_report(Terms source, Terms target, const BilingualDictionary& dict) {
  MatchReport report;
  report.size_source = source.size();
  report.size_target = target.size();
  for (const auto& w : source) report.oov_source += dict.contains(w, Side::kSource) ? 0 : 1;
  for (const auto& w : target) report.oov_target += dict.contains(w, Side::kTarget) ? 0 : 1;

  std::vector<std::string_view> left;
  for (const auto w : distinct(source)) {
    if (dict.contains(w, Side::kSource)) left.push_back(w);
  }
  std::vector<std::string_view> right;
  for (const auto w : distinct(target)) {
    if (dict.contains(w, Side::kTarget)) right.push_back(w);
  }
  std::vector<std::vector<std::size_t>> adjacency(left.size());
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (dict.translates(left[i], right[j])) adjacency[i].push_back(j);
    }
  }
  report.matched = BipartiteMatcher(std::move(adjacency), right.size()).solve();
  return report;
}

double oov_rate(Terms source, Terms target, const BilingualDictionary& dict) {
  if (source.empty() || target.empty()) {
    throw Error(ErrorCode::kUndefinedRate, "OOV rate of an empty document is undefined");
  }
  const MatchReport r = match_report(source, target, dict);
  return 0.5 * (static_cast<double>(r.oov_source) / static_cast<double>(r.size_source) +
                static_cast<double>(r.oov_target) / static_cast<double>(r.size_target));
}

double matching_rate(Terms source, Terms target, const BilingualDictionary& dict) {
  if (source.empty() && target.empty()) {
    throw Error(ErrorCode::kUndefinedRate, "matching rate of two empty documents is undefined");
  }
  const MatchReport r = match_report(source, target, dict);
  return static_cast<double>(r.matched) / static_cast<double>(r.size_source + r.size_target);
}

}  // namespace xling::bidict

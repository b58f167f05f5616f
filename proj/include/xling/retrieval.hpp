#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "xling/bidict.hpp"
#include "xling/lsi.hpp"

namespace xling::retrieval {

// A preprocessed document: reduced terms plus the keys used for grouping.
struct TokenDoc {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::string> group;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row i of `vectors` is the embedding of `ids[i]`.
struct EmbeddingSet {
  std::vector<std::string> ids;
  RowMatrix vectors;

  std::size_t size() const noexcept { return ids.size(); }
  int dimension() const noexcept { return static_cast<int>(vectors.cols()); }
};

EmbeddingSet embed_documents(const std::vector<TokenDoc>& docs, const lsi::LsiModel& model,
                             bidict::Side side);

// Vector store persistence: magic, dimension, count, then (id, vector) records.
void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet load_embeddings(const std::filesystem::path& path);

struct RankedEntry {
  std::string id;
  double similarity = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

struct RankedList {
  std::string query_id;
  std::vector<RankedEntry> entries;  // descending similarity, ties by ascending id
  bool skipped = false;
  std::string skip_reason;
};

// Top-n candidates by cosine. Throws empty-candidates on an empty set and
// dimension-mismatch when the query and candidate sizes differ.
RankedList retrieve(const Eigen::VectorXd& query, const EmbeddingSet& candidates, std::size_t n,
                    std::string query_id = {});

class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  // Returns the document rendered in the target language. Throws
  // Error(kProvider) when no translation is available.
  virtual TokenDoc translate(const TokenDoc& doc, const std::string& target_language) const = 0;
};

class IdentityProvider final : public TranslationProvider {
 public:
  TokenDoc translate(const TokenDoc& doc, const std::string& target_language) const override;
};

// Word-for-word: each source term is replaced by all of its translations in
// lexicographic order; terms missing from the dictionary are kept unchanged.
class DictionaryProvider final : public TranslationProvider {
 public:
  explicit DictionaryProvider(std::shared_ptr<const bidict::BilingualDictionary> dict)
      : dict_(std::move(dict)) {}
  TokenDoc translate(const TokenDoc& doc, const std::string& target_language) const override;

 private:
  std::shared_ptr<const bidict::BilingualDictionary> dict_;
};

// Precomputed translations keyed by document id.
class CachedProvider final : public TranslationProvider {
 public:
  explicit CachedProvider(std::unordered_map<std::string, std::vector<std::string>> cache)
      : cache_(std::move(cache)) {}
  TokenDoc translate(const TokenDoc& doc, const std::string& target_language) const override;

 private:
  std::unordered_map<std::string, std::vector<std::string>> cache_;
};

// Monolingual target-language model: candidates are projected directly,
// each query is translated first. Provider failures mark the query skipped.
std::vector<RankedList> retrieve_ar_lsi(const std::vector<TokenDoc>& queries,
                                        const std::vector<TokenDoc>& candidates,
                                        const lsi::LsiModel& model,
                                        const TranslationProvider& provider, std::size_t n);
std::vector<RankedList> retrieve_ar_lsi(const std::vector<TokenDoc>& queries,
                                        const EmbeddingSet& candidates, const lsi::LsiModel& model,
                                        const TranslationProvider& provider, std::size_t n);

// Cross-lingual model: both sides are folded in with the other language's
// coordinates at zero.
std::vector<RankedList> retrieve_cl_lsi(const std::vector<TokenDoc>& queries,
                                        const std::vector<TokenDoc>& candidates,
                                        const lsi::LsiModel& model, std::size_t n);
std::vector<RankedList> retrieve_cl_lsi(const std::vector<TokenDoc>& queries,
                                        const EmbeddingSet& candidates, const lsi::LsiModel& model,
                                        std::size_t n);

struct AlignmentPair {
  std::string source_id;
  std::string target_id;
  double similarity = 0.0;
  std::string group;  // empty when ungrouped

  friend bool operator==(const AlignmentPair&, const AlignmentPair&) = default;
};

struct AlignOptions {
  std::size_t top_n = 15;
  // Partition both sides by TokenDoc::group before aligning.
  bool grouped = false;
  // Keep a pair only if the source is also the target's best source.
  bool mutual_best = false;
};

// Each source is paired with its most similar target in the same group (a
// target may be chosen more than once). Pairs are sorted by descending
// similarity and cut to top_n per group. Groups present on one side only
// are skipped and reported through `warnings`.
std::vector<AlignmentPair> align_corpora(const std::vector<TokenDoc>& sources,
                                         const std::vector<TokenDoc>& targets,
                                         const lsi::LsiModel& model, const AlignOptions& options,
                                         std::vector<std::string>* warnings = nullptr);

// Same, over precomputed embeddings; `source_groups`/`target_groups` are
// parallel to the sets and ignored unless options.grouped.
std::vector<AlignmentPair> align_embeddings(const EmbeddingSet& sources,
                                            const std::vector<std::string>& source_groups,
                                            const EmbeddingSet& targets,
                                            const std::vector<std::string>& target_groups,
                                            const AlignOptions& options,
                                            std::vector<std::string>* warnings = nullptr);

using GoldMapping = std::map<std::string, std::string>;  // query id -> expected id

// Fraction of queries whose gold id is among the first k entries. Skipped
// queries count as misses. Throws missing-gold naming the first query without
// a gold entry.
double recall_at_k(const std::vector<RankedList>& lists, const GoldMapping& gold, std::size_t k);

inline constexpr std::array<double, 7> kHistogramEdges = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
inline constexpr std::size_t kHistogramBins = kHistogramEdges.size() + 1;

// Bin 0 is (-inf, 0.3), bin i in 1..6 is [edge[i-1], edge[i]), bin 7 is [0.9, +inf).
std::size_t histogram_bin(double similarity) noexcept;
std::string histogram_label(std::size_t bin);

struct GroupRange {
  std::string group;
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
};

struct QueryHit {
  std::string query_id;
  std::size_t rank = 0;  // 1-based rank of the gold id; 0 if absent or skipped
};

struct EvalReport {
  std::map<std::size_t, double> recall;  // k -> R@k
  std::vector<QueryHit> hits;
  std::vector<GroupRange> groups;
  std::array<std::size_t, kHistogramBins> histogram{};
  std::size_t pair_count = 0;
  std::optional<std::size_t> correct;
  std::optional<double> accuracy;
};

EvalReport retrieval_report(const std::vector<RankedList>& lists, const GoldMapping& gold,
                            const std::vector<std::size_t>& ks);

// Per-group similarity ranges and histogram; accuracy when gold is given
// (a pair is correct when gold maps its source to its target).
EvalReport alignment_report(const std::vector<AlignmentPair>& pairs,
                            const GoldMapping* gold = nullptr);

// Each document queried against the whole collection must retrieve itself
// first; returns 1.0 or throws self-test-failure listing the offenders.
double oracle_experiment(const std::vector<TokenDoc>& docs, const lsi::LsiModel& model,
                         bidict::Side side);

void write_report_json(const EvalReport& report, std::ostream& out);
void write_ranges_csv(const EvalReport& report, std::ostream& out);
void write_histogram_csv(const EvalReport& report, std::ostream& out);
void write_alignment_tsv(const std::vector<AlignmentPair>& pairs, std::ostream& out);
void write_ranked_lists_jsonl(const std::vector<RankedList>& lists, std::ostream& out);

}  // namespace xling::retrieval

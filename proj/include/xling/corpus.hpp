#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xling::corpus {

struct Document {
  std::string id;
  std::string language;  // ISO-639-1
  std::string text;
  std::optional<std::string> group_key;  // e.g. "2012-03"
  std::optional<std::string> category;
  // Set when `text` is empty; consumers may rank such documents last.
  bool degenerate = false;

  friend bool operator==(const Document&, const Document&) = default;
};

// source_docs[i] and target_docs[i] form the i-th couple.
struct AlignedCorpus {
  std::vector<Document> source_docs;
  std::vector<Document> target_docs;

  std::size_t size() const noexcept { return source_docs.size(); }
  bool empty() const noexcept { return source_docs.empty(); }

  void push_back(Document source, Document target);

  // Throws Error if the sides differ in length, ids are empty or repeated,
  // languages are mixed on a side, or an empty text is not flagged degenerate.
  void validate() const;

  friend bool operator==(const AlignedCorpus&, const AlignedCorpus&) = default;
};

enum class CorpusFormat { kPairDirs, kJsonl };

CorpusFormat parse_corpus_format(const std::string& name);

struct LoadOptions {
  // Subdirectory names for the pairdirs layout; also the default languages
  // for jsonl records that do not carry src_lang/tgt_lang.
  std::string source_language = "en";
  std::string target_language = "ar";
};

AlignedCorpus load_aligned_corpus(const std::filesystem::path& path, CorpusFormat format,
                                  const LoadOptions& options = {});

AlignedCorpus read_corpus_jsonl(std::istream& in, const LoadOptions& options = {});
void write_corpus_jsonl(const AlignedCorpus& corpus, std::ostream& out);
void write_corpus_jsonl(const AlignedCorpus& corpus, const std::filesystem::path& path);

// Unpaired document collections, one {"id","text","lang","group_key","category"}
// object per line.
std::vector<Document> read_documents_jsonl(std::istream& in, const std::string& default_language);
std::vector<Document> load_documents_jsonl(const std::filesystem::path& path,
                                           const std::string& default_language);
void write_documents_jsonl(const std::vector<Document>& docs, std::ostream& out);

struct CorpusSplit {
  AlignedCorpus train;
  AlignedCorpus test;
};

// Seeded shuffle of couple indices; |train| = round(train_fraction * d).
// Both parts keep the original relative order of their couples.
CorpusSplit split_corpus(const AlignedCorpus& corpus, double train_fraction, std::uint64_t seed);

}  // namespace xling::corpus

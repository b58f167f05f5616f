#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace xling::vsm {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, std::int64_t>;
using TokenList = std::vector<std::string>;

// Term <-> row index bijection with document frequencies. Terms are indexed
// in lexicographic (byte) order so that models are reproducible.
class Vocabulary {
 public:
  Vocabulary() = default;
  // `terms` must be strictly increasing; every df must lie in [1, document_count].
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> df,
             std::uint64_t document_count);

  // Throws empty-corpus when `documents` is empty. Empty documents are allowed.
  static Vocabulary build(std::span<const TokenList> documents);

  std::size_t size() const noexcept { return terms_.size(); }
  std::uint64_t document_count() const noexcept { return document_count_; }
  const std::string& term(std::size_t index) const { return terms_[index]; }
  std::uint64_t df(std::size_t index) const { return df_[index]; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::uint64_t>& document_frequencies() const noexcept { return df_; }

  std::optional<std::uint32_t> index_of(const std::string& term) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_ && a.df_ == b.df_ && a.document_count_ == b.document_count_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> df_;
  std::uint64_t document_count_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// tf * ln(N / df), with tf the raw in-document count. This is the single place
// where the weighting variant is defined.
double tfidf_weight(std::uint64_t tf, std::uint64_t df, std::uint64_t n_docs);

// Sparse vector with strictly increasing indices.
struct DocVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::size_t dimension = 0;

  double norm() const;
  double dot(const DocVector& other) const;
  Eigen::VectorXd to_dense() const;
  bool empty() const noexcept { return entries.empty(); }
};

// tfidf vector of a token list; terms missing from the vocabulary are dropped.
DocVector vectorize(std::span<const std::string> tokens, const Vocabulary& vocabulary);

// Zero when either vector has zero norm.
double cosine(const DocVector& u, const DocVector& v);
double cosine(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v);

struct TermDocMatrix {
  Vocabulary vocabulary;
  SparseMatrix weights;  // |V| x d

  DocVector column(std::size_t j) const;
};

// |V| x d tfidf matrix over the vocabulary of `documents`.
TermDocMatrix build_term_doc_matrix(std::span<const TokenList> documents);

// Column-wise assembly of sparse vectors sharing one dimension.
SparseMatrix assemble_columns(std::span<const DocVector> columns, std::size_t rows);

// Matrix persistence: little-endian header (magic, N, |V|, d, weighting tag)
// followed by (row, col, value) triples in column-major order.
inline constexpr std::string_view kTfidfTag = "tfidf-raw-ln";

void save_matrix(const TermDocMatrix& matrix, std::ostream& out);
void save_matrix(const TermDocMatrix& matrix, const std::filesystem::path& path);
// Loads the weights only; the vocabulary must be persisted separately.
SparseMatrix load_matrix(std::istream& in, std::uint64_t* n_docs = nullptr);
void dump_matrix_text(const TermDocMatrix& matrix, std::ostream& out);

}  // namespace xling::vsm

#include "xling/vsm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <unordered_set>

#include "binary_io.hpp"
#include "xling/error.hpp"

namespace xling::vsm {

namespace {

constexpr char kMatrixMagic[8] = {'X', 'L', 'T', 'D', 'M', 'A', 'T', '1'};

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> df,
                       std::uint64_t document_count)
    : terms_(std::move(terms)), df_(std::move(df)), document_count_(document_count) {
  if (terms_.size() != df_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary terms and df differ in length");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw Error(ErrorCode::kInvalidArgument, "vocabulary terms must be strictly increasing");
    }
    if (df_[i] == 0 || df_[i] > document_count_) {
      throw Error(ErrorCode::kDomain, "document frequency out of range for " + terms_[i]);
    }
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

Vocabulary Vocabulary::build(std::span<const TokenList> documents) {
  if (documents.empty()) throw Error(ErrorCode::kEmptyCorpus, "no documents to index");
  std::map<std::string, std::uint64_t> df;
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : documents) {
    seen.clear();
    for (const auto& token : doc) {
      if (seen.insert(token).second) ++df[token];
    }
  }
  std::vector<std::string> terms;
  std::vector<std::uint64_t> counts;
  terms.reserve(df.size());
  counts.reserve(df.size());
  for (auto& [term, count] : df) {
    terms.push_back(term);
    counts.push_back(count);
  }
  return Vocabulary(std::move(terms), std::move(counts), documents.size());
}

std::optional<std::uint32_t> Vocabulary::index_of(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double tfidf_weight(std::uint64_t tf, std::uint64_t df, std::uint64_t n_docs) {
  if (tf == 0) return 0.0;
  if (df == 0 || df > n_docs) {
    throw Error(ErrorCode::kDomain, "tfidf requires 1 <= df <= N (df=" + std::to_string(df) +
                                        ", N=" + std::to_string(n_docs) + ")");
  }
  if (df == n_docs) return 0.0;
  return static_cast<double>(tf) * std::log(static_cast<double>(n_docs) / static_cast<double>(df));
}

double DocVector::norm() const {
  double sum = 0.0;
  for (const auto& [index, weight] : entries) sum += weight * weight;
  return std::sqrt(sum);
}

double DocVector::dot(const DocVector& other) const {
  double sum = 0.0;
  auto a = entries.begin();
  auto b = other.entries.begin();
  while (a != entries.end() && b != other.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      sum += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return sum;
}

Eigen::VectorXd DocVector::to_dense() const {
  Eigen::VectorXd dense = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension));
  for (const auto& [index, weight] : entries) dense(index) = weight;
  return dense;
}

DocVector vectorize(std::span<const std::string> tokens, const Vocabulary& vocabulary) {
  std::map<std::uint32_t, std::uint64_t> tf;
  for (const auto& token : tokens) {
    if (auto index = vocabulary.index_of(token)) ++tf[*index];
  }
  DocVector vec;
  vec.dimension = vocabulary.size();
  for (const auto& [index, count] : tf) {
    const double w = tfidf_weight(count, vocabulary.df(index), vocabulary.document_count());
    if (w != 0.0) vec.entries.emplace_back(index, w);
  }
  return vec;
}

double cosine(const DocVector& u, const DocVector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.dot(v) / (nu * nv);
}

double cosine(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine of vectors with dimensions " +
                                                   std::to_string(u.size()) + " and " +
                                                   std::to_string(v.size()));
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.dot(v) / (nu * nv);
}

DocVector TermDocMatrix::column(std::size_t j) const {
  DocVector vec;
  vec.dimension = static_cast<std::size_t>(weights.rows());
  for (SparseMatrix::InnerIterator it(weights, static_cast<Eigen::Index>(j)); it; ++it) {
    vec.entries.emplace_back(static_cast<std::uint32_t>(it.row()), it.value());
  }
  return vec;
}

SparseMatrix assemble_columns(std::span<const DocVector> columns, std::size_t rows) {
  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].dimension != rows) {
      throw Error(ErrorCode::kDimensionMismatch, "column dimension differs from row count");
    }
    for (const auto& [index, weight] : columns[j].entries) {
      triplets.emplace_back(index, static_cast<std::int64_t>(j), weight);
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

TermDocMatrix build_term_doc_matrix(std::span<const TokenList> documents) {
  TermDocMatrix matrix;
  matrix.vocabulary = Vocabulary::build(documents);
  std::vector<DocVector> columns;
  columns.reserve(documents.size());
  for (const auto& doc : documents) columns.push_back(vectorize(doc, matrix.vocabulary));
  matrix.weights = assemble_columns(columns, matrix.vocabulary.size());
  return matrix;
}

void save_matrix(const TermDocMatrix& matrix, std::ostream& out) {
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  detail::write_le<std::uint64_t>(out, matrix.vocabulary.document_count());
  detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(matrix.weights.rows()));
  detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(matrix.weights.cols()));
  detail::write_string(out, std::string(kTfidfTag));
  detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(matrix.weights.nonZeros()));
  for (Eigen::Index j = 0; j < matrix.weights.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(matrix.weights, j); it; ++it) {
      detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(it.row()));
      detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(it.col()));
      detail::write_le<double>(out, it.value());
    }
  }
}

void save_matrix(const TermDocMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  save_matrix(matrix, out);
}

SparseMatrix load_matrix(std::istream& in, std::uint64_t* n_docs) {
  detail::LeReader reader(in, ErrorCode::kCorruptModel);
  char magic[sizeof(kMatrixMagic)];
  reader.read_bytes(magic, sizeof(magic), "matrix magic");
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMatrixMagic))) {
    throw Error(ErrorCode::kCorruptModel, "not a term-document matrix file");
  }
  const auto n = reader.read<std::uint64_t>("document count");
  const auto rows = reader.read<std::uint64_t>("row count");
  const auto cols = reader.read<std::uint64_t>("column count");
  const std::string tag = reader.read_string("weighting tag", 256);
  if (tag != kTfidfTag) throw Error(ErrorCode::kCorruptModel, "unknown weighting tag " + tag);
  const auto nnz = reader.read<std::uint64_t>("nonzero count");
  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  for (std::uint64_t i = 0; i < nnz; ++i) {
    const auto r = reader.read<std::uint64_t>("triple");
    const auto c = reader.read<std::uint64_t>("triple");
    const auto v = reader.read<double>("triple");
    if (r >= rows || c >= cols) throw Error(ErrorCode::kCorruptModel, "triple out of range");
    triplets.emplace_back(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c), v);
  }
  if (n_docs != nullptr) *n_docs = n;
  SparseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

void dump_matrix_text(const TermDocMatrix& matrix, std::ostream& out) {
  out << "# N=" << matrix.vocabulary.document_count() << " |V|=" << matrix.weights.rows()
      << " d=" << matrix.weights.cols() << " weighting=" << kTfidfTag << '\n';
  char buf[64];
  for (Eigen::Index j = 0; j < matrix.weights.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(matrix.weights, j); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%.17g", it.value());
      out << matrix.vocabulary.term(static_cast<std::size_t>(it.row())) << '\t' << it.col() << '\t'
          << buf << '\n';
    }
  }
}

}  // namespace xling::vsm

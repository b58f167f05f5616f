#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xling/bidict.hpp"
#include "xling/svd.hpp"
#include "xling/vsm.hpp"

namespace xling::lsi {

using bidict::Side;
using vsm::TokenList;

enum class ModelKind : std::uint8_t { kMonolingual = 0, kCrosslingual = 1 };

std::string_view model_kind_name(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view name);

// Row space of a cross-lingual matrix: source-language terms occupy rows
// [0, |V_s|), target-language terms follow. Document frequencies are counted
// over concatenated couples, so each side's df is its own document count.
struct CrossVocabulary {
  vsm::Vocabulary source;
  vsm::Vocabulary target;

  std::size_t size() const noexcept { return source.size() + target.size(); }
  std::size_t offset(Side side) const noexcept {
    return side == Side::kSource ? 0 : source.size();
  }
  const vsm::Vocabulary& side(Side s) const noexcept {
    return s == Side::kSource ? source : target;
  }
};

struct CrossMatrix {
  CrossVocabulary vocabulary;
  vsm::SparseMatrix weights;  // (|V_s| + |V_t|) x d
};

// |V| x d tfidf matrix of one language side.
vsm::TermDocMatrix build_mono_matrix(std::span<const TokenList> documents);

// Column j holds the tfidf of the concatenated couple (source_j, target_j).
CrossMatrix build_cross_matrix(std::span<const TokenList> source_docs,
                               std::span<const TokenList> target_docs);

struct LsiModel {
  ModelKind kind = ModelKind::kMonolingual;
  std::string source_language;
  std::string target_language;  // empty for monolingual models
  // Monolingual models keep their single vocabulary in `vocabulary.source`.
  CrossVocabulary vocabulary;
  Eigen::MatrixXd u;  // |V| x k
  Eigen::VectorXd s;  // k
  Eigen::MatrixXd v;  // d x k

  int k() const noexcept { return static_cast<int>(s.size()); }
  std::size_t dimension() const noexcept { return vocabulary.size(); }
  std::size_t documents() const noexcept { return static_cast<std::size_t>(v.rows()); }
};

struct TrainResult {
  LsiModel model;
  int requested_k = 0;
  // True when k was reduced to the matrix size or its numerical rank.
  bool clamped = false;
  int iterations = 0;
  double residual = 0.0;
};

TrainResult train_monolingual(std::span<const TokenList> documents, int k, std::string language,
                              const SvdOptions& options = {});
TrainResult train_crosslingual(std::span<const TokenList> source_docs,
                               std::span<const TokenList> target_docs, int k,
                               std::string source_language, std::string target_language,
                               const SvdOptions& options = {});

// Fold-in v^T U S^-1 of a vector expressed in the model's row space.
Eigen::VectorXd project(const vsm::DocVector& doc, const LsiModel& model);

// Monolingual models: tfidf vector over the model vocabulary.
vsm::DocVector vectorize(std::span<const std::string> tokens, const LsiModel& model);
// Cross-lingual models: the other language's coordinates are left at zero.
vsm::DocVector vectorize(std::span<const std::string> tokens, Side side, const LsiModel& model);

Eigen::VectorXd embed(std::span<const std::string> tokens, const LsiModel& model);
Eigen::VectorXd embed_crosslingual(std::span<const std::string> tokens, Side side,
                                   const LsiModel& model);

// Model file: magic, format version, kind, k, |V|, d, languages, vocabulary
// block, then U, S, V as little-endian float64 (row-major).
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const LsiModel& model, std::ostream& out);
void save_model(const LsiModel& model, const std::filesystem::path& path);
LsiModel load_model(std::istream& in);
LsiModel load_model(const std::filesystem::path& path);

}  // namespace xling::lsi

#include "xling/lsi.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "binary_io.hpp"
#include "xling/error.hpp"

namespace xling::lsi {

namespace {

constexpr char kModelMagic[8] = {'X', 'L', 'L', 'S', 'I', 'M', 'D', 'L'};
constexpr std::uint32_t kMaxTermBytes = 1u << 16;

void write_vocabulary(std::ostream& out, const vsm::Vocabulary& vocab) {
  detail::write_le<std::uint64_t>(out, vocab.document_count());
  detail::write_le<std::uint64_t>(out, vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    detail::write_string(out, vocab.term(i));
    detail::write_le<std::uint64_t>(out, vocab.df(i));
  }
}

vsm::Vocabulary read_vocabulary(detail::LeReader& reader) {
  const auto n = reader.read<std::uint64_t>("vocabulary document count");
  const auto size = reader.read<std::uint64_t>("vocabulary size");
  if (size > (1ull << 32)) reader.fail("vocabulary size");
  std::vector<std::string> terms;
  std::vector<std::uint64_t> df;
  for (std::uint64_t i = 0; i < size; ++i) {
    terms.push_back(reader.read_string("vocabulary term", kMaxTermBytes));
    df.push_back(reader.read<std::uint64_t>("document frequency"));
  }
  try {
    return vsm::Vocabulary(std::move(terms), std::move(df), n);
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptModel, std::string("invalid vocabulary block: ") + e.what());
  }
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) detail::write_le<double>(out, m(i, j));
  }
}

Eigen::MatrixXd read_matrix(detail::LeReader& reader, Eigen::Index rows, Eigen::Index cols,
                            const char* what) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = reader.read<double>(what);
  }
  return m;
}

TrainResult factorise(const vsm::SparseMatrix& weights, int k, const SvdOptions& options) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  const auto size_cap = static_cast<int>(std::min(weights.rows(), weights.cols()));
  TruncatedSvd svd = truncated_svd(weights, std::min(k, size_cap), options);
  TrainResult result;
  result.requested_k = k;
  result.clamped = svd.s.size() < k;
  result.iterations = svd.iterations;
  result.residual = svd.residual;
  result.model.u = std::move(svd.u);
  result.model.s = std::move(svd.s);
  result.model.v = std::move(svd.v);
  return result;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) noexcept {
  return kind == ModelKind::kMonolingual ? "mono" : "cross";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "mono" || name == "monolingual") return ModelKind::kMonolingual;
  if (name == "cross" || name == "crosslingual") return ModelKind::kCrosslingual;
  throw Error(ErrorCode::kInvalidArgument, "unknown model kind '" + std::string(name) + "'");
}

vsm::TermDocMatrix build_mono_matrix(std::span<const TokenList> documents) {
  return vsm::build_term_doc_matrix(documents);
}

CrossMatrix build_cross_matrix(std::span<const TokenList> source_docs,
                               std::span<const TokenList> target_docs) {
  if (source_docs.size() != target_docs.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "source and target document counts differ");
  }
  CrossMatrix out;
  out.vocabulary.source = vsm::Vocabulary::build(source_docs);
  out.vocabulary.target = vsm::Vocabulary::build(target_docs);
  const std::size_t rows = out.vocabulary.size();
  const auto offset = static_cast<std::uint32_t>(out.vocabulary.source.size());
  std::vector<vsm::DocVector> columns;
  columns.reserve(source_docs.size());
  for (std::size_t j = 0; j < source_docs.size(); ++j) {
    vsm::DocVector col = vsm::vectorize(source_docs[j], out.vocabulary.source);
    col.dimension = rows;
    for (const auto& [index, weight] : vsm::vectorize(target_docs[j], out.vocabulary.target).entries) {
      col.entries.emplace_back(index + offset, weight);
    }
    columns.push_back(std::move(col));
  }
  out.weights = vsm::assemble_columns(columns, rows);
  return out;
}

TrainResult train_monolingual(std::span<const TokenList> documents, int k, std::string language,
                              const SvdOptions& options) {
  vsm::TermDocMatrix matrix = build_mono_matrix(documents);
  TrainResult result = factorise(matrix.weights, k, options);
  result.model.kind = ModelKind::kMonolingual;
  result.model.source_language = std::move(language);
  result.model.vocabulary.source = std::move(matrix.vocabulary);
  return result;
}

TrainResult train_crosslingual(std::span<const TokenList> source_docs,
                               std::span<const TokenList> target_docs, int k,
                               std::string source_language, std::string target_language,
                               const SvdOptions& options) {
  CrossMatrix matrix = build_cross_matrix(source_docs, target_docs);
  TrainResult result = factorise(matrix.weights, k, options);
  result.model.kind = ModelKind::kCrosslingual;
  result.model.source_language = std::move(source_language);
  result.model.target_language = std::move(target_language);
  result.model.vocabulary = std::move(matrix.vocabulary);
  return result;
}

Eigen::VectorXd project(const vsm::DocVector& doc, const LsiModel& model) {
  if (doc.dimension != static_cast<std::size_t>(model.u.rows())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector dimension " + std::to_string(doc.dimension) + " does not match model rows " +
                    std::to_string(model.u.rows()));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(model.k());
  for (const auto& [index, weight] : doc.entries) out += weight * model.u.row(index).transpose();
  return out.cwiseQuotient(model.s);
}

vsm::DocVector vectorize(std::span<const std::string> tokens, const LsiModel& model) {
  if (model.kind != ModelKind::kMonolingual) {
    throw Error(ErrorCode::kInvalidArgument, "cross-lingual model needs a language side");
  }
  return vsm::vectorize(tokens, model.vocabulary.source);
}

vsm::DocVector vectorize(std::span<const std::string> tokens, Side side, const LsiModel& model) {
  if (model.kind != ModelKind::kCrosslingual) {
    if (side != Side::kSource) {
      throw Error(ErrorCode::kInvalidArgument, "monolingual model has no target side");
    }
    return vectorize(tokens, model);
  }
  vsm::DocVector vec = vsm::vectorize(tokens, model.vocabulary.side(side));
  const auto offset = static_cast<std::uint32_t>(model.vocabulary.offset(side));
  for (auto& entry : vec.entries) entry.first += offset;
  vec.dimension = model.vocabulary.size();
  return vec;
}

Eigen::VectorXd embed(std::span<const std::string> tokens, const LsiModel& model) {
  return project(vectorize(tokens, model), model);
}

Eigen::VectorXd embed_crosslingual(std::span<const std::string> tokens, Side side,
                                   const LsiModel& model) {
  return project(vectorize(tokens, side, model), model);
}

void save_model(const LsiModel& model, std::ostream& out) {
  out.write(kModelMagic, sizeof(kModelMagic));
  detail::write_le<std::uint32_t>(out, kModelFormatVersion);
  detail::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(model.kind));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.k()));
  detail::write_le<std::uint64_t>(out, model.dimension());
  detail::write_le<std::uint64_t>(out, model.documents());
  detail::write_string(out, model.source_language);
  detail::write_string(out, model.target_language);
  write_vocabulary(out, model.vocabulary.source);
  if (model.kind == ModelKind::kCrosslingual) write_vocabulary(out, model.vocabulary.target);
  write_matrix(out, model.u);
  for (Eigen::Index i = 0; i < model.s.size(); ++i) detail::write_le<double>(out, model.s(i));
  write_matrix(out, model.v);
  if (!out) throw Error(ErrorCode::kIo, "failed writing model");
}

void save_model(const LsiModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  save_model(model, out);
}

LsiModel load_model(std::istream& in) {
  detail::LeReader reader(in, ErrorCode::kCorruptModel);
  char magic[sizeof(kModelMagic)];
  reader.read_bytes(magic, sizeof(magic), "model magic");
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kModelMagic))) {
    throw Error(ErrorCode::kCorruptModel, "not an LSI model file");
  }
  const auto version = reader.read<std::uint32_t>("format version");
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "model format version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  LsiModel model;
  const auto kind = reader.read<std::uint8_t>("model kind");
  if (kind > 1) throw Error(ErrorCode::kCorruptModel, "unknown model kind");
  model.kind = static_cast<ModelKind>(kind);
  const auto k = reader.read<std::uint32_t>("k");
  const auto rows = reader.read<std::uint64_t>("row count");
  const auto docs = reader.read<std::uint64_t>("document count");
  model.source_language = reader.read_string("source language", 64);
  model.target_language = reader.read_string("target language", 64);
  model.vocabulary.source = read_vocabulary(reader);
  if (model.kind == ModelKind::kCrosslingual) model.vocabulary.target = read_vocabulary(reader);
  if (model.vocabulary.size() != rows || docs != model.vocabulary.source.document_count() || k == 0 || k > rows || k > docs) {
    throw Error(ErrorCode::kCorruptModel, "model header is inconsistent with its vocabulary");
  }
  const auto ki = static_cast<Eigen::Index>(k);
  model.u = read_matrix(reader, static_cast<Eigen::Index>(rows), ki, "U");
  model.s.resize(ki);
  for (Eigen::Index i = 0; i < ki; ++i) {
    model.s(i) = reader.read<double>("S");
    if (!(model.s(i) > 0.0)) throw Error(ErrorCode::kCorruptModel, "non-positive singular value");
  }
  model.v = read_matrix(reader, static_cast<Eigen::Index>(docs), ki, "V");
  if (!reader.at_end()) throw Error(ErrorCode::kCorruptModel, "trailing bytes after model data");
  return model;
}

LsiModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return load_model(in);
}

}  // namespace xling::lsi

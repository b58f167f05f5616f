#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "xling/error.hpp"
#include "xling/vsm.hpp"

namespace xling::vsm {
namespace {

using Docs = std::vector<TokenList>;

TEST(Vocabulary, HandCount) {
  const Docs docs = {{"a", "b"}, {"b"}};
  const Vocabulary v = Vocabulary::build(docs);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.index_of("a"), 0u);
  EXPECT_EQ(v.index_of("b"), 1u);
  EXPECT_EQ(v.df(0), 1u);
  EXPECT_EQ(v.df(1), 2u);
  EXPECT_EQ(v.document_count(), 2u);
}

TEST(Vocabulary, SingleEmptyDocumentAllowed) {
  const Docs docs = {{}};
  const Vocabulary v = Vocabulary::build(docs);
  EXPECT_EQ(v.size(), 0u);
  EXPECT_EQ(v.document_count(), 1u);
}

TEST(Vocabulary, NoDocumentsIsEmptyCorpus) {
  try {
    Vocabulary::build(Docs{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(Vocabulary, DuplicateTokensCountOnce) {
  const Docs docs = {{"a", "a", "a"}, {"b"}};
  EXPECT_EQ(Vocabulary::build(docs).df(0), 1u);
}

TEST(Vocabulary, LexicographicIndexing) {
  const Docs docs = {{"zeta", "alpha", "mu"}};
  EXPECT_EQ(Vocabulary::build(docs).terms(), (std::vector<std::string>{"alpha", "mu", "zeta"}));
}

TEST(Tfidf, Examples) {
  EXPECT_EQ(tfidf_weight(5, 7, 7), 0.0);
  EXPECT_EQ(tfidf_weight(0, 1, 4), 0.0);
  EXPECT_NEAR(tfidf_weight(2, 1, 4), 2.772588722239781, 1e-12);
}

TEST(Tfidf, DomainErrors) {
  EXPECT_THROW(tfidf_weight(1, 5, 4), Error);
  EXPECT_THROW(tfidf_weight(1, 0, 4), Error);
}

TEST(Vectorize, UnseenTermsDropped) {
  const Docs docs = {{"a", "b"}, {"b", "c"}};
  const Vocabulary v = Vocabulary::build(docs);
  EXPECT_TRUE(vectorize(TokenList{"x", "y"}, v).empty());
  const DocVector mixed = vectorize(TokenList{"a", "x", "a"}, v);
  ASSERT_EQ(mixed.entries.size(), 1u);
  EXPECT_EQ(mixed.entries[0].first, 0u);
  EXPECT_NEAR(mixed.entries[0].second, 2 * std::log(2.0), 1e-15);
  EXPECT_EQ(mixed.dimension, 3u);
}

TEST(Vectorize, TrainingDocumentEqualsColumn) {
  const Docs docs = {{"olive", "oil", "oil"}, {"fig", "oil"}, {"date", "palm", "fig"}, {"olive"}};
  const TermDocMatrix m = build_term_doc_matrix(docs);
  for (std::size_t j = 0; j < docs.size(); ++j) {
    const DocVector col = m.column(j);
    const DocVector vec = vectorize(docs[j], m.vocabulary);
    EXPECT_EQ(col.entries, vec.entries) << j;
  }
}

TEST(Cosine, Examples) {
  Eigen::VectorXd x(3);
  x << 1, 2, 3;
  EXPECT_NEAR(cosine(x, x), 1.0, 1e-15);
  EXPECT_EQ(cosine(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), 0.0);
  EXPECT_NEAR(cosine(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 0)), std::sqrt(2.0) / 2, 1e-15);
  EXPECT_EQ(cosine(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)), 0.0);
}

DocVector random_sparse(std::mt19937_64& rng, std::size_t dim) {
  DocVector v;
  v.dimension = dim;
  std::bernoulli_distribution keep(0.3);
  std::uniform_real_distribution<double> w(0.0, 5.0);
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (keep(rng)) v.entries.emplace_back(i, w(rng));
  }
  return v;
}

TEST(Cosine, SparseMatchesDenseOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const DocVector a = random_sparse(rng, 40);
    const DocVector b = random_sparse(rng, 40);
    std::vector<double> da(40, 0.0), db(40, 0.0);
    for (auto [i, w] : a.entries) da[i] = w;
    for (auto [i, w] : b.entries) db[i] = w;
    double dot = 0, na = 0, nb = 0;
    for (int i = 0; i < 40; ++i) {
      dot += da[i] * db[i];
      na += da[i] * da[i];
      nb += db[i] * db[i];
    }
    const double expected = (na == 0 || nb == 0) ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
    const double got = cosine(a, b);
    EXPECT_NEAR(got, expected, 1e-12);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0 + 1e-15);
    EXPECT_NEAR(cosine(b, a), got, 1e-15);
    DocVector scaled = a;
    for (auto& e : scaled.entries) e.second *= 3.5;
    EXPECT_NEAR(cosine(scaled, b), got, 1e-12);
  }
}

TEST(Matrix, HandTfidf) {
  // N=2: "a" in both docs (idf 0), "b" only in doc 0, "c" only in doc 1.
  const Docs docs = {{"a", "b", "b"}, {"a", "c"}};
  const TermDocMatrix m = build_term_doc_matrix(docs);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(m.weights);
  Eigen::MatrixXd expected(3, 2);
  expected << 0, 0, 2 * std::log(2.0), 0, 0, std::log(2.0);
  EXPECT_TRUE(dense.isApprox(expected, 1e-15)) << dense;
  EXPECT_EQ(m.weights.nonZeros(), 2);
}

TEST(Matrix, PersistenceRoundTrip) {
  const Docs docs = {{"a", "b", "b"}, {"a", "c"}, {"c", "d"}};
  const TermDocMatrix m = build_term_doc_matrix(docs);
  std::stringstream buf;
  save_matrix(m, buf);
  std::uint64_t n = 0;
  const SparseMatrix loaded = load_matrix(buf, &n);
  EXPECT_EQ(n, 3u);
  EXPECT_TRUE(Eigen::MatrixXd(loaded).isApprox(Eigen::MatrixXd(m.weights), 0.0));
  std::ostringstream text;
  dump_matrix_text(m, text);
  EXPECT_NE(text.str().find("tfidf-raw-ln"), std::string::npos);
}

}  // namespace
}  // namespace xling::vsm

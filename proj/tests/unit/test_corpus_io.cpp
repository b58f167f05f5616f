#include <sstream>

#include <gtest/gtest.h>

#include "tempdir.hpp"
#include "xling/corpus.hpp"
#include "xling/error.hpp"

namespace xling::corpus {
namespace {

using testing::TempDir;
using testing::write_file;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(PairDirs, SinglePairGivesOneCouple) {
  TempDir dir;
  write_file(dir / "en/001.txt", "The olive tree.");
  write_file(dir / "ar/001.txt", "شجرة الزيتون");
  const AlignedCorpus corpus = load_aligned_corpus(dir.path(), CorpusFormat::kPairDirs);
  ASSERT_EQ(corpus.size(), 1u);
  EXPECT_EQ(corpus.source_docs[0].id, "001");
  EXPECT_EQ(corpus.source_docs[0].language, "en");
  EXPECT_EQ(corpus.target_docs[0].language, "ar");
  EXPECT_EQ(corpus.target_docs[0].text, "شجرة الزيتون");
}

TEST(PairDirs, OrphanFileIsMissingCounterpart) {
  TempDir dir;
  write_file(dir / "en/001.txt", "a");
  write_file(dir / "ar/001.txt", "b");
  write_file(dir / "en/002.txt", "c");
  EXPECT_EQ(code_of([&] { load_aligned_corpus(dir.path(), CorpusFormat::kPairDirs); }),
            ErrorCode::kMissingCounterpart);
}

TEST(PairDirs, MissingPathIsIoError) {
  EXPECT_EQ(code_of([] { load_aligned_corpus("/nonexistent/xling", CorpusFormat::kPairDirs); }),
            ErrorCode::kIo);
}

TEST(PairDirs, EmptyTextIsFlaggedDegenerate) {
  TempDir dir;
  write_file(dir / "en/001.txt", "");
  write_file(dir / "ar/001.txt", "b");
  const AlignedCorpus corpus = load_aligned_corpus(dir.path(), CorpusFormat::kPairDirs);
  EXPECT_TRUE(corpus.source_docs[0].degenerate);
  EXPECT_FALSE(corpus.target_docs[0].degenerate);
}

const char* kThreeLines =
    R"({"src_id":"a","tgt_id":"x","src_text":"one","tgt_text":"uno"})"
    "\n"
    R"({"src_id":"b","tgt_id":"y","src_text":"two","tgt_text":"dos","group_key":"2012-03"})"
    "\n"
    R"({"src_id":"c","tgt_id":"z","src_text":"three","tgt_text":"tres"})"
    "\n";

TEST(Jsonl, ThreeLinesKeepOrder) {
  std::istringstream in(kThreeLines);
  const AlignedCorpus corpus = read_corpus_jsonl(in);
  ASSERT_EQ(corpus.size(), 3u);
  EXPECT_EQ(corpus.source_docs[0].id, "a");
  EXPECT_EQ(corpus.source_docs[1].id, "b");
  EXPECT_EQ(corpus.source_docs[2].id, "c");
  EXPECT_EQ(corpus.target_docs[2].text, "tres");
  EXPECT_EQ(corpus.source_docs[1].group_key, "2012-03");
  EXPECT_EQ(corpus.target_docs[1].group_key, "2012-03");
  EXPECT_FALSE(corpus.source_docs[0].group_key.has_value());
}

TEST(Jsonl, MissingTargetFieldNamesLine) {
  std::istringstream in(
      R"({"src_id":"a","tgt_id":"x","src_text":"one","tgt_text":"uno"})"
      "\n"
      R"({"src_id":"b","tgt_id":"y","src_text":"two"})"
      "\n");
  try {
    read_corpus_jsonl(in);
    FAIL() << "expected malformed-record";
  } catch (const RecordError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedRecord);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Jsonl, InvalidJsonIsMalformed) {
  std::istringstream in("{not json}\n");
  EXPECT_EQ(code_of([&] { read_corpus_jsonl(in); }), ErrorCode::kMalformedRecord);
}

TEST(Jsonl, RepeatedIdRejected) {
  std::istringstream in(
      R"({"src_id":"a","tgt_id":"x","src_text":"1","tgt_text":"1"})"
      "\n"
      R"({"src_id":"a","tgt_id":"y","src_text":"2","tgt_text":"2"})"
      "\n");
  EXPECT_EQ(code_of([&] { read_corpus_jsonl(in); }), ErrorCode::kMalformedRecord);
}

TEST(Jsonl, RoundTrip) {
  std::istringstream in(kThreeLines);
  const AlignedCorpus corpus = read_corpus_jsonl(in);
  std::ostringstream out;
  write_corpus_jsonl(corpus, out);
  std::istringstream again(out.str());
  EXPECT_EQ(read_corpus_jsonl(again), corpus);
}

TEST(Documents, RoundTripWithGroups) {
  std::vector<Document> docs = {{"d1", "en", "text one", "2012-01", "politics", false},
                                {"d2", "en", "text two", std::nullopt, std::nullopt, false}};
  std::ostringstream out;
  write_documents_jsonl(docs, out);
  std::istringstream in(out.str());
  EXPECT_EQ(read_documents_jsonl(in, "en"), docs);
}

AlignedCorpus numbered(std::size_t d) {
  AlignedCorpus corpus;
  for (std::size_t i = 0; i < d; ++i) {
    const std::string id = "c" + std::to_string(i);
    corpus.push_back({id, "en", "s" + id, std::nullopt, std::nullopt, false},
                     {id, "ar", "t" + id, std::nullopt, std::nullopt, false});
  }
  return corpus;
}

TEST(Split, NinetyTen) {
  const CorpusSplit split = split_corpus(numbered(10), 0.9, 42);
  EXPECT_EQ(split.train.size(), 9u);
  EXPECT_EQ(split.test.size(), 1u);
}

TEST(Split, SmallestLegalSplit) {
  const CorpusSplit split = split_corpus(numbered(2), 0.5, 42);
  EXPECT_EQ(split.train.size(), 1u);
  EXPECT_EQ(split.test.size(), 1u);
}

TEST(Split, SameSeedSamePartition) {
  const AlignedCorpus corpus = numbered(50);
  EXPECT_EQ(split_corpus(corpus, 0.9, 7).test, split_corpus(corpus, 0.9, 7).test);
}

TEST(Split, PartsPartitionTheCorpusInOrder) {
  const AlignedCorpus corpus = numbered(30);
  const CorpusSplit split = split_corpus(corpus, 0.8, 3);
  std::vector<std::string> seen;
  for (const auto& d : split.train.source_docs) seen.push_back(d.id);
  for (const auto& d : split.test.source_docs) seen.push_back(d.id);
  std::sort(seen.begin(), seen.end());
  std::vector<std::string> all;
  for (const auto& d : corpus.source_docs) all.push_back(d.id);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(seen, all);
  auto index = [](const std::string& id) { return std::stoul(id.substr(1)); };
  for (std::size_t i = 1; i < split.train.size(); ++i) {
    EXPECT_LT(index(split.train.source_docs[i - 1].id), index(split.train.source_docs[i].id));
  }
}

TEST(Split, DegenerateFractions) {
  EXPECT_EQ(code_of([] { split_corpus(numbered(1), 0.5, 1); }), ErrorCode::kDegenerateCorpus);
  EXPECT_EQ(code_of([] { split_corpus(numbered(10), 1.0, 1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { split_corpus(numbered(10), 0.01, 1); }), ErrorCode::kDegenerateCorpus);
}

}  // namespace
}  // namespace xling::corpus

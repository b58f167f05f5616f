#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "measure_oracle.hpp"
#include "xling/bidict.hpp"
#include "xling/error.hpp"
#include "xling/textprep.hpp"
#include "xling/vsm.hpp"

namespace xling::bidict {
namespace {

using Words = std::vector<std::string>;
namespace oracle = testing::oracle;

BilingualDictionary parse(const std::string& text) {
  std::istringstream in(text);
  return BilingualDictionary::read(in);
}

BilingualDictionary identity_dictionary(const Words& words) {
  BilingualDictionary dict;
  for (const auto& w : words) dict.add_synset({w}, {w});
  return dict;
}

TEST(Load, OneSynsetBothIndices) {
  const auto dict = parse("book\tكتاب|مؤلف\n");
  ASSERT_EQ(dict.synsets().size(), 1u);
  EXPECT_TRUE(dict.contains("book", Side::kSource));
  EXPECT_TRUE(dict.contains("كتاب", Side::kTarget));
  EXPECT_TRUE(dict.contains("مؤلف", Side::kTarget));
  EXPECT_EQ(dict.translations("book", Side::kSource), (std::set<std::string>{"كتاب", "مؤلف"}));
  EXPECT_EQ(dict.translations("مؤلف", Side::kTarget), (std::set<std::string>{"book"}));
}

TEST(Load, EmptyFileIsEmptyDictionary) { EXPECT_TRUE(parse("").empty()); }

TEST(Load, DuplicateLinesMerge) {
  const auto once = parse("book\tكتاب\n");
  const auto twice = parse("book\tكتاب\nbook\tكتاب\n");
  EXPECT_EQ(once.synsets(), twice.synsets());
}

TEST(Load, CommentsAndBlankLines) {
  EXPECT_EQ(parse("# header\n\nsun\tشمس\n").synsets().size(), 1u);
}

TEST(Load, MalformedLineNamesLine) {
  try {
    parse("sun\tشمس\nno tab here\n");
    FAIL();
  } catch (const RecordError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedRecord);
    EXPECT_EQ(e.line(), 2u);
  }
}

class Toy : public ::testing::Test {
 protected:
  BilingualDictionary dict = parse("book\tkitab\nauthor|writer\tmuallif\npen\tqalam\n");
};

TEST_F(Toy, Trans) {
  EXPECT_EQ(trans("moon", Words{"kitab"}, dict), 0);
  EXPECT_EQ(trans("book", Words{"x", "kitab"}, dict), 1);
  EXPECT_EQ(trans("book", Words{"qalam"}, dict), 0);
}

TEST_F(Toy, BinExamples) {
  EXPECT_EQ(bin_measure(Words{"book", "pen", "moon"}, Words{"kitab", "qalam"}, dict), 1.0);
  EXPECT_EQ(bin_measure(Words{"moon", "sun"}, Words{"kitab"}, dict), 0.0);
  EXPECT_EQ(bin_measure(Words{"book", "pen", "author", "writer"}, Words{"kitab", "x"}, dict), 0.25);
  EXPECT_EQ(bin_measure(Words{"book", "pen", "author", "writer", "book"},
                        Words{"kitab", "muallif"}, dict),
            0.75);
}

TEST_F(Toy, BinSymmetricIsMeanOfDirections) {
  const Words s = {"book", "pen"};
  const Words t = {"kitab", "muallif", "qalam", "zzz"};
  EXPECT_EQ(bin_measure(s, t, dict), 1.0);
  EXPECT_NEAR(bin_measure(t, s, dict, Side::kTarget), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(bin_symmetric(s, t, dict), (1.0 + 2.0 / 3.0) / 2, 1e-15);
}

TEST(BinSymmetric, DirectionsHalfAndQuarterGiveThreeEighths) {
  const auto dict = parse("a|b\tA\nc\tC\nd\tD\ne\tE\nf\tF\ng\tG\n");
  const Words s = {"a", "b", "c", "d"};
  const Words t = {"A", "E", "F", "G"};
  EXPECT_EQ(bin_measure(s, t, dict), 0.5);
  EXPECT_EQ(bin_measure(t, s, dict, Side::kTarget), 0.25);
  EXPECT_EQ(bin_symmetric(s, t, dict), 0.375);
}

TEST(BinSymmetric, IdentityDictionaryIdenticalDocuments) {
  const Words doc = {"x", "y", "z", "x"};
  EXPECT_EQ(bin_symmetric(doc, doc, identity_dictionary({"x", "y", "z"})), 1.0);
}

TEST(BinPooled, CountsTokensOverBothSizes) {
  const auto dict = parse("a\tA\nb\tB\n");
  // translated tokens: a, a (source) and A (target) over 3 + 2 tokens
  EXPECT_EQ(bin_pooled(Words{"a", "a", "c"}, Words{"A", "D"}, dict), 3.0 / 5.0);
}

class CosineToy : public ::testing::Test {
 protected:
  BilingualDictionary dict = parse("book\tkitab\nauthor\tmuallif\npen\tqalam\n");
  std::vector<Words> sources = {{"book", "book", "author"}, {"pen"}, {"book", "pen"}};
  std::vector<Words> targets = {{"kitab", "muallif", "muallif"}, {"qalam"}, {"qalam", "kitab"}};
  vsm::Vocabulary source_stats = vsm::Vocabulary::build(sources);
  vsm::Vocabulary target_stats = vsm::Vocabulary::build(targets);
};

TEST_F(CosineToy, HandComputation) {
  const double a = std::log(1.5);
  const double l = std::log(3.0);
  // attributes (author,muallif), (book,kitab), (pen,qalam)
  const double expected =
      (2 * a * a + 2 * l * l) / std::sqrt((4 * a * a + l * l) * (a * a + 4 * l * l));
  EXPECT_NEAR(dict_cosine(sources[0], targets[0], dict, source_stats, target_stats), expected, 1e-12);
}

TEST_F(CosineToy, NoActivePairIsZero) {
  EXPECT_EQ(dict_cosine(sources[1], targets[0], dict, source_stats, target_stats), 0.0);
}

TEST_F(CosineToy, ProportionalProfilesGiveOne) {
  const std::vector<Words> s = {{"book", "pen", "pen"}, {"author"}};
  const std::vector<Words> t = {{"kitab", "qalam", "qalam"}, {"muallif"}};
  EXPECT_NEAR(dict_cosine(s[0], t[0], dict, vsm::Vocabulary::build(s), vsm::Vocabulary::build(t)),
              1.0, 1e-15);
}

TEST(Oov, Examples) {
  const auto dict = parse("a\tA\nb\tB\nc\tC\n");
  EXPECT_EQ(oov_rate(Words{"a", "b"}, Words{"A", "C"}, dict), 0.0);
  EXPECT_EQ(oov_rate(Words{"a"}, Words{"A"}, BilingualDictionary{}), 1.0);
  EXPECT_EQ(oov_rate(Words{"a", "b", "c", "z"}, Words{"A", "Z"}, dict), 0.375);
  EXPECT_THROW(oov_rate(Words{}, Words{"A"}, dict), Error);
}

TEST(Matching, Examples) {
  const auto dict = parse("a\tA\nb\tB\nc\tC\n");
  EXPECT_EQ(matching_rate(Words{"x", "y"}, Words{"X"}, dict), 0.0);
  EXPECT_EQ(matching_rate(Words{"a", "b", "c", "z"}, Words{"A", "B", "C", "X", "Y", "Z"}, dict), 0.3);
  const Words doc = {"p", "q", "r", "s", "t"};
  EXPECT_EQ(matching_rate(doc, doc, identity_dictionary(doc)), 0.5);
  EXPECT_THROW(matching_rate(Words{}, Words{}, dict), Error);
}

TEST(Matching, OneToOneAcrossSharedTranslations) {
  // both a and b translate only to A: one pair can be matched.
  const auto dict = parse("a|b\tA\n");
  EXPECT_EQ(match_report(Words{"a", "b"}, Words{"A"}, dict).matched, 1u);
}

TEST(Measures, AgreeWithBruteForceOnRandomToys) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto dict = oracle::random_dictionary(rng);
    const Words s = oracle::random_doc(rng, 's');
    const Words t = oracle::random_doc(rng, 't');
    EXPECT_EQ(bin_measure(s, t, dict), oracle::bin(s, t, dict, true));
    EXPECT_EQ(bin_symmetric(s, t, dict), oracle::bin_symmetric(s, t, dict));
    EXPECT_EQ(bin_symmetric(s, t, dict), bin_symmetric(s, t, dict));
    if (!s.empty() && !t.empty()) EXPECT_EQ(oov_rate(s, t, dict), oracle::oov(s, t, dict));
    if (!s.empty() || !t.empty()) EXPECT_EQ(matching_rate(s, t, dict), oracle::matching(s, t, dict));
  }
}

TEST(Measures, BinIsMonotoneInTargetAdditions) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dict = oracle::random_dictionary(rng);
    const Words s = oracle::random_doc(rng, 's', 8, 10, 1);
    Words t = oracle::random_doc(rng, 't');
    const double before = bin_measure(s, t, dict);
    for (const auto& tr : dict.translations(s.front(), Side::kSource)) t.push_back(tr);
    EXPECT_GE(bin_measure(s, t, dict), before);
  }
}

TEST(Measures, RangeIsUnitInterval) {
  std::mt19937_64 rng(7);
  std::vector<Words> ss;
  std::vector<Words> ts;
  for (int i = 0; i < 20; ++i) {
    ss.push_back(oracle::random_doc(rng, 's', 8, 10, 1));
    ts.push_back(oracle::random_doc(rng, 't', 8, 10, 1));
  }
  const auto sv = vsm::Vocabulary::build(ss);
  const auto tv = vsm::Vocabulary::build(ts);
  const auto dict = oracle::random_dictionary(rng);
  for (int i = 0; i < 20; ++i) {
    for (double v : {bin_symmetric(ss[i], ts[i], dict), bin_pooled(ss[i], ts[i], dict),
                     dict_cosine(ss[i], ts[i], dict, sv, tv), oov_rate(ss[i], ts[i], dict),
                     matching_rate(ss[i], ts[i], dict)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-15);
    }
    EXPECT_NEAR(dict_cosine(ss[i], ts[i], dict, sv, tv),
                oracle::dict_cosine(ss[i], ts[i], dict, ss, ts), 1e-12);
  }
}

// English forms with irregular and suffixed inflections against Arabic forms
// carrying clitics; the dictionary lists lemmas and stems.
TEST(ReducerCombinations, MorphArWithLemmasMatchesMost) {
  using textprep::Reducer;
  using textprep::ReducerKind;
  auto res = std::make_shared<textprep::ReducerResources>();
  const std::string root = res->rooter.reduce("الكاتب");
  const std::string stem = res->light.reduce("المكتبة");
  ASSERT_NE(root, res->light.reduce("الكاتب"));
  BilingualDictionary dict;
  dict.add_synset({"library"}, {stem});
  dict.add_synset({"write"}, {root});
  dict.add_synset({"go"}, {"ذهب"});
  const Words english = {"went", "libraries", "writes"};
  const Words arabic = {"المكتبة", "الكاتب", "ذهب"};

  auto reduce = [](const Words& words, const Reducer& r) {
    Words out;
    for (const auto& w : words) out.push_back(r.reduce(w));
    return out;
  };
  std::map<std::string, double> rates;
  for (auto e : {ReducerKind::kIdentity, ReducerKind::kSuffixStemmer, ReducerKind::kLemmaTable}) {
    for (auto a : {ReducerKind::kIdentity, ReducerKind::kLightStemmer, ReducerKind::kRooter,
                   ReducerKind::kMorphAr}) {
      const Reducer er(e, res);
      const Reducer ar(a, res, &dict, Side::kTarget);
      rates[std::string(textprep::reducer_kind_name(e)) + "+" +
            std::string(textprep::reducer_kind_name(a))] =
          matching_rate(reduce(english, er), reduce(arabic, ar), dict);
    }
  }
  const double best = rates.at("lemma_table+morphar");
  for (const auto& [name, rate] : rates) EXPECT_LE(rate, best) << name;
  EXPECT_EQ(best, 0.5);
}

}  // namespace
}  // namespace xling::bidict

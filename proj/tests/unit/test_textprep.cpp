#include <gtest/gtest.h>

#include "xling/bidict.hpp"
#include "xling/error.hpp"
#include "xling/textprep.hpp"

namespace xling::textprep {
namespace {

using Strings = std::vector<std::string>;

Strings surfaces(const std::vector<Token>& tokens) {
  Strings out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

TEST(Tokenize, PunctuationSeparatesAndLowercases) {
  EXPECT_EQ(surfaces(tokenize("He writes, well.")), (Strings{"he", "writes", "well"}));
}

TEST(Tokenize, Empty) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, MixedToken) { EXPECT_EQ(surfaces(tokenize("v2.0 beta")), (Strings{"v2", "0", "beta"})); }

TEST(Tokenize, CaseKeptWhenRequested) {
  EXPECT_EQ(surfaces(tokenize("Olive Oil", false)), (Strings{"Olive", "Oil"}));
}

TEST(Tokenize, ReducedStartsAsSurface) {
  for (const auto& t : tokenize("one two")) EXPECT_EQ(t.reduced, t.surface);
}

TEST(Tokenize, ArabicDiacriticsAndTatweelDropped) {
  // kataba with fatha marks, and a word stretched by tatweel
  EXPECT_EQ(surfaces(tokenize("كَتَبَ كتـــاب")), (Strings{"كتب", "كتاب"}));
}

TEST(Utf8, CodePointLength) {
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("كتاب"), 4u);
}

std::vector<std::vector<Token>> docs_of(const std::vector<Strings>& words) {
  std::vector<std::vector<Token>> docs;
  for (const auto& d : words) {
    std::vector<Token> doc;
    for (const auto& w : d) doc.push_back({w, w});
    docs.push_back(doc);
  }
  return docs;
}

Strings reduced(const std::vector<Token>& doc) {
  Strings out;
  for (const auto& t : doc) out.push_back(t.reduced);
  return out;
}

TEST(Filters, RareTermsRemoved) {
  const auto docs = docs_of({{"olive", "oil", "rare"}, {"olive", "oil", "rare", "oil"}, {"olive"}});
  PipelineConfig config;
  config.min_corpus_frequency = 3;
  const auto out = apply_filters(docs, config, count_terms(docs));
  EXPECT_EQ(reduced(out[0]), (Strings{"olive", "oil"}));
  EXPECT_EQ(reduced(out[1]), (Strings{"olive", "oil", "oil"}));
  EXPECT_EQ(reduced(out[2]), (Strings{"olive"}));
}

TEST(Filters, IdentityWithoutStopwords) {
  const auto docs = docs_of({{"a", "b"}, {"c"}});
  const auto out = apply_filters(docs, PipelineConfig{}, count_terms(docs));
  EXPECT_EQ(out, docs);
}

TEST(Filters, StopwordRemoved) {
  const auto docs = docs_of({{"the", "oil", "the"}});
  PipelineConfig config;
  config.stopwords = {"the"};
  EXPECT_EQ(reduced(apply_filters(docs, config, count_terms(docs))[0]), (Strings{"oil"}));
}

TEST(Filters, ZeroMinimumFrequencyRejected) {
  PipelineConfig config;
  config.min_corpus_frequency = 0;
  EXPECT_THROW(config.validate(), Error);
}

TEST(Reducers, Identity) { EXPECT_EQ(Reducer().reduce("library"), "library"); }

TEST(Reducers, LightStemmerArabicDefaults) { EXPECT_EQ(LightStemmer().reduce("المكتبة"), "مكتب"); }

TEST(Reducers, LightStemmerKeepsShortStems) {
  // stripping the article would leave two letters
  EXPECT_EQ(LightStemmer().reduce("الكب"), "الكب");
}

TEST(Reducers, LightStemmerCustomLists) {
  const LightStemmer stemmer({"un", "re"}, {"ing", "s"}, 3);
  EXPECT_EQ(stemmer.reduce("rewritings"), "writ");
  EXPECT_EQ(stemmer.reduce("undo"), "undo");
}

TEST(Reducers, SuffixStemmer) {
  const SuffixStemmer stemmer;
  EXPECT_EQ(stemmer.reduce("writes"), "write");
  EXPECT_EQ(stemmer.reduce("running"), "run");
  EXPECT_EQ(stemmer.reduce("libraries"), "library");
}

TEST(Reducers, SuffixStemmerIsFixedPoint) {
  const SuffixStemmer stemmer;
  for (const char* w : {"writes", "nationalities", "hopelessness", "running", "agreed", "oils"}) {
    const std::string once = stemmer.reduce(w);
    EXPECT_EQ(stemmer.reduce(once), once) << w;
  }
}

TEST(Reducers, LemmaTableIrregularAndFallback) {
  const LemmaTable table;
  EXPECT_EQ(table.reduce("went"), "go");
  EXPECT_EQ(table.reduce("writes"), "write");
}

TEST(Reducers, RooterIsAtMostLightStem) {
  const Rooter rooter;
  const std::string root = rooter.reduce("المكتبة");
  EXPECT_LE(utf8_length(root), utf8_length(LightStemmer().reduce("المكتبة")));
  EXPECT_GE(utf8_length(root), 3u);
}

TEST(Reducers, KindNamesRoundTrip) {
  for (auto kind : {ReducerKind::kIdentity, ReducerKind::kSuffixStemmer, ReducerKind::kLemmaTable,
                    ReducerKind::kLightStemmer, ReducerKind::kRooter, ReducerKind::kMorphAr}) {
    EXPECT_EQ(parse_reducer_kind(reducer_kind_name(kind)), kind);
  }
  EXPECT_THROW(parse_reducer_kind("porter9"), Error);
}

class MorphAr : public ::testing::Test {
 protected:
  LightStemmer light;
  Rooter rooter;
};

TEST_F(MorphAr, LightFormWins) {
  bidict::BilingualDictionary dict;
  const std::string stem = light.reduce("المكتبة");
  dict.add_synset({"library"}, {stem});
  dict.add_synset({"write"}, {rooter.reduce("المكتبة")});
  EXPECT_EQ(morphar_lookup("المكتبة", dict, light, rooter), (std::set<std::string>{"library"}));
}

TEST_F(MorphAr, RootFallback) {
  bidict::BilingualDictionary dict;
  const std::string root = rooter.reduce("المكتبة");
  ASSERT_NE(root, light.reduce("المكتبة"));
  dict.add_synset({"write"}, {root});
  EXPECT_EQ(morphar_lookup("المكتبة", dict, light, rooter), (std::set<std::string>{"write"}));
}

TEST_F(MorphAr, NeitherKnown) {
  bidict::BilingualDictionary dict;
  dict.add_synset({"sun"}, {"شمس"});
  EXPECT_TRUE(morphar_lookup("المكتبة", dict, light, rooter).empty());
}

TEST_F(MorphAr, ReducerPicksKnownForm) {
  bidict::BilingualDictionary dict;
  const std::string root = rooter.reduce("المكتبة");
  dict.add_synset({"write"}, {root});
  const Reducer reducer(ReducerKind::kMorphAr, std::make_shared<ReducerResources>(), &dict);
  EXPECT_EQ(reducer.reduce("المكتبة"), root);
  EXPECT_EQ(reducer.reduce("الشمس"), light.reduce("الشمس"));
}

TEST(Pipeline, AnalyzeReducesAndDropsStopwords) {
  const Pipeline pipeline(true, {"the"}, Reducer(ReducerKind::kSuffixStemmer,
                                                  std::make_shared<ReducerResources>()));
  EXPECT_EQ(pipeline.terms("The writer writes"), (Strings{"writer", "write"}));
}

TEST(Pipeline, CorpusFrequencyFilter) {
  const Pipeline pipeline;
  const auto docs = analyze_corpus(pipeline, {"oil oil olive", "oil fig"}, 2);
  EXPECT_EQ(docs[0], (Strings{"oil", "oil"}));
  EXPECT_EQ(docs[1], (Strings{"oil"}));
}

TEST(WordList, CommentsAndBlanksSkipped) {
  std::istringstream in("# stopwords\nthe\n\nof\n");
  EXPECT_EQ(read_word_list(in), (Strings{"the", "of"}));
}

}  // namespace
}  // namespace xling::textprep

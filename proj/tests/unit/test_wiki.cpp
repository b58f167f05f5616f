#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "golden.hpp"
#include "xling/error.hpp"
#include "xling/wiki.hpp"

namespace xling::corpus {
namespace {

using Links = std::vector<InterlanguageLink>;

TEST(InterlanguageLinks, FrenchLink) {
  EXPECT_EQ(parse_interlanguage_links("[[fr:Thomas Edward Lawrence]]"),
            (Links{{"fr", "Thomas Edward Lawrence"}}));
}

TEST(InterlanguageLinks, EmptyInput) { EXPECT_TRUE(parse_interlanguage_links("").empty()); }

TEST(InterlanguageLinks, NamespacedLinkExcluded) {
  EXPECT_EQ(parse_interlanguage_links("[[Category:Oils]] [[ar:زيت زيتون]]"),
            (Links{{"ar", "زيت زيتون"}}));
}

TEST(InterlanguageLinks, ArticleKeepsFirstLinkPerLanguage) {
  const WikiArticle a = WikiArticle::from_wikitext("en", "T", "[[de:A]] [[fr:B]] [[de:C]]");
  EXPECT_EQ(a.interlanguage_links, (Links{{"de", "A"}, {"fr", "B"}}));
  ASSERT_NE(a.link_to("de"), nullptr);
  EXPECT_EQ(a.link_to("de")->title, "A");
  EXPECT_EQ(a.link_to("ar"), nullptr);
}

TEST(StripMarkup, PipedLinkAndTemplate) {
  EXPECT_EQ(strip_wiki_markup("[[Olive oil|oil]] is {{cn}} good"), "oil is good");
}

TEST(StripMarkup, PlainIsIdentity) { EXPECT_EQ(strip_wiki_markup("plain"), "plain"); }

TEST(StripMarkup, NestedTemplate) { EXPECT_EQ(strip_wiki_markup("{{a{{b}}c}}x"), "x"); }

class Golden : public ::testing::TestWithParam<testing::GoldenCase> {};

TEST_P(Golden, LinksAndText) {
  const auto& c = GetParam();
  EXPECT_EQ(parse_interlanguage_links(c.input), c.links);
  EXPECT_EQ(strip_wiki_markup(c.input), c.text);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, Golden,
                         ::testing::ValuesIn(testing::load_golden_cases(XLING_FIXTURES "/wiki/golden")),
                         [](const auto& info) {
                           std::string name = info.param.name;
                           for (char& ch : name) {
                             if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
                           }
                           return name;
                         });

TEST(GoldenSuite, HasTwentyCases) {
  EXPECT_EQ(testing::load_golden_cases(XLING_FIXTURES "/wiki/golden").size(), 20u);
}

std::string page(const std::string& title, const std::string& text, int ns = 0) {
  return "<page><title>" + title + "</title><ns>" + std::to_string(ns) +
         "</ns><revision><text>" + text + "</text></revision></page>\n";
}

std::vector<ComparableTuple> extract(const std::string& dump, ExtractStats* stats,
                                     std::vector<std::string> langs) {
  std::istringstream in(dump);
  std::vector<ComparableTuple> tuples;
  *stats = extract_comparable_articles(in, "en", std::move(langs),
                                       [&](ComparableTuple&& t) { tuples.push_back(std::move(t)); });
  return tuples;
}

TEST(Dump, MinimalPositive) {
  const std::string dump = "<mediawiki xml:lang=\"en\">" + page("Oil", "Oil. [[fr:Huile]] [[ar:زيت]]") +
                           "</mediawiki><mediawiki xml:lang=\"fr\">" + page("Huile", "Huile.") +
                           "</mediawiki><mediawiki xml:lang=\"ar\">" + page("زيت", "زيت.") +
                           "</mediawiki>";
  ExtractStats stats;
  const auto tuples = extract(dump, &stats, {"fr", "ar"});
  ASSERT_EQ(tuples.size(), 1u);
  EXPECT_EQ(tuples[0].pivot.title, "Oil");
  ASSERT_EQ(tuples[0].linked.size(), 2u);
  EXPECT_EQ(tuples[0].linked[0].language, "ar");
  EXPECT_EQ(tuples[0].linked[1].language, "fr");
  EXPECT_EQ(tuples[0].linked[1].wikitext, "Huile.");
  EXPECT_EQ(stats.pages, 3u);
}

TEST(Dump, UnresolvedLinkIsCounted) {
  const std::string dump = "<mediawiki xml:lang=\"en\">" + page("Oil", "Oil. [[fr:Huile]] [[ar:زيت]]") +
                           "</mediawiki><mediawiki xml:lang=\"ar\">" + page("زيت", "زيت.") +
                           "</mediawiki>";
  ExtractStats stats;
  EXPECT_TRUE(extract(dump, &stats, {"fr", "ar"}).empty());
  EXPECT_EQ(stats.unresolved, 1u);
}

TEST(Dump, TitleNormalisation) {
  const std::string dump = "<mediawiki xml:lang=\"en\">" + page("Oil", "[[ar:زيت_الزيتون]]") +
                           "</mediawiki><mediawiki xml:lang=\"ar\">" + page("زيت الزيتون", "x") +
                           "</mediawiki>";
  ExtractStats stats;
  EXPECT_EQ(extract(dump, &stats, {"ar"}).size(), 1u);
}

TEST(Dump, SixPageFixture) {
  std::ifstream in(XLING_FIXTURES "/wiki/dump6.xml", std::ios::binary);
  ASSERT_TRUE(in);
  std::vector<std::string> pivots;
  const ExtractStats stats = extract_comparable_articles(
      in, "en", {"ar"}, [&](ComparableTuple&& t) { pivots.push_back(t.pivot.title); });
  EXPECT_EQ(stats.pages, 6u);
  EXPECT_EQ(stats.pivot_pages, 3u);
  EXPECT_EQ(stats.emitted, 2u);
  EXPECT_EQ(pivots, (std::vector<std::string>{"Olive oil", "Fig"}));
}

TEST(Dump, TruncatedStream) {
  const std::string dump = "<mediawiki xml:lang=\"en\"><page><title>Oil</title><text>abc";
  ExtractStats stats;
  try {
    extract(dump, &stats, {"ar"});
    FAIL() << "expected truncated-stream";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncatedStream);
  }
}

TEST(Dump, EntitiesDecodedInText) {
  std::ifstream in(XLING_FIXTURES "/wiki/dump6.xml", std::ios::binary);
  std::vector<std::string> texts;
  extract_comparable_articles(in, "en", {"ar"}, [&](ComparableTuple&& t) {
    texts.push_back(strip_wiki_markup(t.pivot.wikitext));
  });
  ASSERT_EQ(texts.size(), 2u);
  EXPECT_EQ(texts[0], "Olive oil is a liquid fat.");
  EXPECT_EQ(texts[1], "The fig is edible fruit.");
}

}  // namespace
}  // namespace xling::corpus

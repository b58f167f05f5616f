#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xling::corpus {

struct InterlanguageLink {
  std::string language;
  std::string title;

  friend bool operator==(const InterlanguageLink&, const InterlanguageLink&) = default;
};

struct WikiArticle {
  std::string language;
  std::string title;
  std::string wikitext;
  // At most one entry per language code; the first occurrence wins.
  std::vector<InterlanguageLink> interlanguage_links;

  static WikiArticle from_wikitext(std::string language, std::string title, std::string wikitext);
  const InterlanguageLink* link_to(std::string_view language) const;
};

// Every `[[xx:Title]]` whose code is 2-3 lowercase ASCII letters, in text order.
// Titles are returned verbatim. Ordinary and namespaced links are excluded.
std::vector<InterlanguageLink> parse_interlanguage_links(std::string_view wikitext);

// Reduces wikitext to running text: templates, tables, file/category and
// interlanguage links, ref tags, comments and html tags are removed; piped
// links keep their label. Unbalanced constructs swallow the rest of the input.
std::string strip_wiki_markup(std::string_view wikitext);

struct ComparableTuple {
  WikiArticle pivot;
  // One article per required language, ordered by language code.
  std::vector<WikiArticle> linked;
};

struct ExtractStats {
  std::size_t pages = 0;
  std::size_t pivot_pages = 0;
  std::size_t emitted = 0;
  // Pivot pages carrying every required link where some linked title was
  // not found in the dump.
  std::size_t unresolved = 0;
};

// Two passes over a seekable dump: the first indexes (language, title) ->
// page offset for main-namespace pages, the second walks pivot pages and
// seeks to the linked pages. A page's language comes from the enclosing
// `<mediawiki xml:lang="..">` root; pages outside any root belong to the
// pivot language. Throws on a truncated stream.
ExtractStats extract_comparable_articles(std::istream& dump, const std::string& pivot_language,
                                         std::vector<std::string> required_languages,
                                         const std::function<void(ComparableTuple&&)>& sink);

}  // namespace xling::corpus

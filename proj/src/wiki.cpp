#include "xling/wiki.hpp"

#include <algorithm>
#include <iterator>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "xling/error.hpp"

namespace xling::corpus {

namespace {

bool is_lower_ascii(char c) { return c >= 'a' && c <= 'z'; }

bool starts_with_at(std::string_view text, std::size_t pos, std::string_view prefix) {
  return text.size() - pos >= prefix.size() && text.compare(pos, prefix.size(), prefix) == 0;
}

bool iequals_ascii(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool istarts_with_at(std::string_view text, std::size_t pos, std::string_view prefix) {
  return text.size() - pos >= prefix.size() && iequals_ascii(text.substr(pos, prefix.size()), prefix);
}

std::size_t ifind(std::string_view text, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= text.size(); ++i) {
    if (istarts_with_at(text, i, needle)) return i;
  }
  return std::string_view::npos;
}

bool is_language_code(std::string_view code) {
  return code.size() >= 2 && code.size() <= 3 && std::all_of(code.begin(), code.end(), is_lower_ascii);
}

// Returns the index one past the closing delimiter matching the opener at
// `pos`, or npos when the construct is unbalanced.
std::size_t skip_balanced(std::string_view text, std::size_t pos, std::string_view open,
                          std::string_view close) {
  int depth = 0;
  std::size_t i = pos;
  while (i < text.size()) {
    if (starts_with_at(text, i, open)) {
      ++depth;
      i += open.size();
    } else if (starts_with_at(text, i, close)) {
      --depth;
      i += close.size();
      if (depth == 0) return i;
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

constexpr std::string_view kDroppedNamespaces[] = {
    "file",   "image", "media",   "category", "template", "wikipedia", "wp",
    "help",   "portal", "user",   "talk",     "special",  "fichier",   "catégorie",
    "modèle", "ملف",   "صورة",    "تصنيف",    "قالب",     "ويكيبيديا", "بوابة"};

// A leading colon makes a namespaced or interlanguage link render inline.
bool is_dropped_link(std::string_view target) {
  if (!target.empty() && target.front() == ':') return false;
  const auto colon = target.find(':');
  if (colon == std::string_view::npos) return false;
  std::string_view prefix = target.substr(0, colon);
  while (!prefix.empty() && prefix.back() == ' ') prefix.remove_suffix(1);
  if (is_language_code(prefix)) return true;
  return std::any_of(std::begin(kDroppedNamespaces), std::end(kDroppedNamespaces),
                     [&](std::string_view ns) { return iequals_ascii(prefix, ns); });
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x110000) {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Decodes the entity starting at text[pos] == '&'. Returns the consumed length,
// or 0 if no known entity starts there.
std::size_t decode_entity(std::string_view text, std::size_t pos, std::string& out,
                          bool nbsp_as_space) {
  const auto semi = text.find(';', pos);
  if (semi == std::string_view::npos || semi - pos > 10) return 0;
  const std::string_view name = text.substr(pos + 1, semi - pos - 1);
  static const std::map<std::string_view, std::string_view> kNamed = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}};
  if (auto it = kNamed.find(name); it != kNamed.end()) {
    out += it->second;
  } else if (name == "nbsp") {
    if (nbsp_as_space) {
      out += ' ';
    } else {
      append_utf8(out, 0xA0);
    }
  } else if (name.size() > 1 && name.front() == '#') {
    std::uint32_t cp = 0;
    const bool hex = name[1] == 'x' || name[1] == 'X';
    std::string_view digits = name.substr(hex ? 2 : 1);
    if (digits.empty()) return 0;
    for (char c : digits) {
      int v;
      if (c >= '0' && c <= '9') {
        v = c - '0';
      } else if (hex && c >= 'a' && c <= 'f') {
        v = c - 'a' + 10;
      } else if (hex && c >= 'A' && c <= 'F') {
        v = c - 'A' + 10;
      } else {
        return 0;
      }
      cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
      if (cp > 0x10FFFF) return 0;
    }
    append_utf8(out, cp);
  } else {
    return 0;
  }
  return semi - pos + 1;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

bool at_line_start(std::string_view text, std::size_t pos) {
  return pos == 0 || text[pos - 1] == '\n';
}

// True if only '=' and blanks remain before the end of the line.
bool heading_tail(std::string_view text, std::size_t pos) {
  for (std::size_t i = pos; i < text.size() && text[i] != '\n'; ++i) {
    if (text[i] != '=' && text[i] != ' ' && text[i] != '\t' && text[i] != '\r') return false;
  }
  return true;
}

void strip_into(std::string_view text, std::string& out) {
  constexpr auto npos = std::string_view::npos;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];

    if (at_line_start(text, i)) {
      if (starts_with_at(text, i, "----")) {
        while (i < n && text[i] == '-') ++i;
        continue;
      }
      std::size_t j = i;
      while (j < n && (text[j] == '*' || text[j] == '#' || text[j] == ':' || text[j] == ';' ||
                       text[j] == '=')) {
        ++j;
      }
      if (j != i) {
        out += ' ';
        i = j;
        continue;
      }
    }

    if (starts_with_at(text, i, "<!--")) {
      const auto end = text.find("-->", i + 4);
      i = end == npos ? n : end + 3;
      continue;
    }
    if (istarts_with_at(text, i, "<ref") && i + 4 < n &&
        (text[i + 4] == '>' || text[i + 4] == ' ' || text[i + 4] == '/')) {
      const auto close = text.find('>', i);
      if (close == npos) {
        i = n;
      } else if (text[close - 1] == '/') {
        i = close + 1;
      } else {
        const auto end = ifind(text, "</ref>", close);
        i = end == npos ? n : end + 6;
      }
      out += ' ';
      continue;
    }
    if (starts_with_at(text, i, "{{")) {
      const auto end = skip_balanced(text, i, "{{", "}}");
      i = end == npos ? n : end;
      continue;
    }
    if (starts_with_at(text, i, "{|")) {
      const auto end = skip_balanced(text, i, "{|", "|}");
      i = end == npos ? n : end;
      out += ' ';
      continue;
    }
    if (starts_with_at(text, i, "[[")) {
      const auto end = skip_balanced(text, i, "[[", "]]");
      if (end == npos) {
        i = n;
        continue;
      }
      const std::string_view inner = text.substr(i + 2, end - i - 4);
      i = end;
      const auto pipe = inner.find('|');
      const std::string_view target = inner.substr(0, pipe);
      if (is_dropped_link(target)) continue;
      std::string_view label = pipe == npos ? target : inner.substr(inner.rfind('|') + 1);
      if (pipe == npos && !label.empty() && label.front() == ':') label.remove_prefix(1);
      strip_into(label, out);
      continue;
    }
    if (c == '[' && (starts_with_at(text, i + 1, "http://") ||
                     starts_with_at(text, i + 1, "https://") || starts_with_at(text, i + 1, "//"))) {
      const auto end = text.find(']', i);
      if (end == npos) {
        i = n;
        continue;
      }
      const std::string_view inner = text.substr(i + 1, end - i - 1);
      const auto space = inner.find(' ');
      if (space != npos) strip_into(inner.substr(space + 1), out);
      i = end + 1;
      continue;
    }
    if (c == '\'' && i + 1 < n && text[i + 1] == '\'') {
      while (i < n && text[i] == '\'') ++i;
      continue;
    }
    if (c == '=' && heading_tail(text, i)) {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '_' && starts_with_at(text, i, "__")) {
      std::size_t j = i + 2;
      while (j < n && std::isupper(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i + 2 && starts_with_at(text, j, "__")) {
        i = j + 2;
        continue;
      }
    }
    if (c == '<' && i + 1 < n &&
        (std::isalpha(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '/')) {
      const auto end = text.find('>', i);
      i = end == npos ? n : end + 1;
      out += ' ';
      continue;
    }
    if (c == '&') {
      if (const auto used = decode_entity(text, i, out, true); used != 0) {
        i += used;
        continue;
      }
    }
    out += c;
    ++i;
  }
}

}  // namespace

std::vector<InterlanguageLink> parse_interlanguage_links(std::string_view wikitext) {
  std::vector<InterlanguageLink> links;
  std::size_t pos = 0;
  std::size_t comment = wikitext.find("<!--");
  while ((pos = wikitext.find("[[", pos)) != std::string_view::npos) {
    if (comment < pos) {
      const auto comment_end = wikitext.find("-->", comment + 4);
      if (comment_end == std::string_view::npos) break;
      comment = wikitext.find("<!--", comment_end + 3);
      if (comment_end + 3 > pos) pos = comment_end + 3;
      continue;
    }
    const auto close = wikitext.find("]]", pos + 2);
    if (close == std::string_view::npos) break;
    const std::string_view inner = wikitext.substr(pos + 2, close - pos - 2);
    const auto colon = inner.find(':');
    if (colon != std::string_view::npos && inner.find('[') == std::string_view::npos &&
        is_language_code(inner.substr(0, colon)) && colon + 1 < inner.size()) {
      links.push_back({std::string(inner.substr(0, colon)), std::string(inner.substr(colon + 1))});
      pos = close + 2;
    } else {
      pos += 2;
    }
  }
  return links;
}

WikiArticle WikiArticle::from_wikitext(std::string language, std::string title,
                                       std::string wikitext) {
  WikiArticle article{std::move(language), std::move(title), std::move(wikitext), {}};
  std::set<std::string> seen;
  for (auto& link : parse_interlanguage_links(article.wikitext)) {
    if (seen.insert(link.language).second) article.interlanguage_links.push_back(std::move(link));
  }
  return article;
}

const InterlanguageLink* WikiArticle::link_to(std::string_view language) const {
  for (const auto& link : interlanguage_links) {
    if (link.language == language) return &link;
  }
  return nullptr;
}

std::string strip_wiki_markup(std::string_view wikitext) {
  std::string raw;
  raw.reserve(wikitext.size());
  strip_into(wikitext, raw);
  return collapse_whitespace(raw);
}

// ---------------------------------------------------------------------------
// Dump reading

namespace {

struct RawPage {
  std::streamoff offset = 0;
  std::string language;
  std::string title;
  std::string ns;
  std::string text;
};

std::string decode_xml_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    if (raw[i] == '&') {
      if (const auto used = decode_entity(raw, i, out, false); used != 0) {
        i += used;
        continue;
      }
    }
    out += raw[i++];
  }
  return out;
}

std::optional<std::string> attribute(std::string_view tag, std::string_view name) {
  std::size_t pos = 0;
  while ((pos = tag.find(name, pos)) != std::string_view::npos) {
    std::size_t i = pos + name.size();
    const bool boundary = pos == 0 || tag[pos - 1] == ' ' || tag[pos - 1] == '\t' ||
                          tag[pos - 1] == '\n';
    while (i < tag.size() && tag[i] == ' ') ++i;
    if (boundary && i < tag.size() && tag[i] == '=') {
      ++i;
      while (i < tag.size() && tag[i] == ' ') ++i;
      if (i < tag.size() && (tag[i] == '"' || tag[i] == '\'')) {
        const char quote = tag[i];
        const auto end = tag.find(quote, i + 1);
        if (end != std::string_view::npos) return std::string(tag.substr(i + 1, end - i - 1));
      }
    }
    pos += name.size();
  }
  return std::nullopt;
}

// Sequential tag scanner over a seekable stream.
class DumpReader {
 public:
  explicit DumpReader(std::istream& in) : in_(in) {}

  void seek(std::streamoff offset) {
    in_.clear();
    in_.seekg(offset);
    if (!in_) throw Error(ErrorCode::kIo, "dump stream is not seekable");
    offset_ = offset;
  }

  std::streamoff offset() const { return offset_; }

  // Reads the next page; `language` tracks `<mediawiki xml:lang>` roots.
  std::optional<RawPage> next_page(std::string& language) {
    std::optional<RawPage> page;
    std::string tag;
    while (true) {
      const std::streamoff tag_start = offset_;
      if (!skip_to('<')) {
        if (page) throw Error(ErrorCode::kTruncatedStream, "dump ends inside <page>");
        return std::nullopt;
      }
      read_tag(tag);
      const std::string_view name = tag_name(tag);
      if (name == "mediawiki") {
        language = attribute(tag, "xml:lang").value_or("");
      } else if (name == "/mediawiki") {
        language.clear();
      } else if (name == "page") {
        page.emplace();
        page->offset = tag_start;
        page->language = language;
      } else if (!page) {
        continue;
      } else if (name == "title") {
        page->title = decode_xml_text(read_until("</title>"));
      } else if (name == "ns") {
        page->ns = read_until("</ns>");
      } else if (name == "text") {
        if (tag.empty() || tag.back() != '/') page->text = decode_xml_text(read_until("</text>"));
      } else if (name == "/page") {
        return page;
      }
    }
  }

 private:
  int get() {
    const int c = in_.rdbuf()->sbumpc();
    if (c != std::char_traits<char>::eof()) ++offset_;
    return c;
  }

  bool skip_to(char target) {
    for (int c = get(); c != std::char_traits<char>::eof(); c = get()) {
      if (c == target) return true;
    }
    return false;
  }

  // Reads the tag body after '<' up to (excluding) '>'.
  void read_tag(std::string& tag) {
    tag.clear();
    for (int c = get(); c != '>'; c = get()) {
      if (c == std::char_traits<char>::eof()) {
        throw Error(ErrorCode::kTruncatedStream, "dump ends inside a tag");
      }
      tag += static_cast<char>(c);
    }
  }

  static std::string_view tag_name(std::string_view tag) {
    const auto end = tag.find_first_of(" \t\r\n/", tag.empty() || tag[0] != '/' ? 0 : 1);
    return tag.substr(0, end);
  }

  std::string read_until(std::string_view terminator) {
    std::string content;
    for (int c = get();; c = get()) {
      if (c == std::char_traits<char>::eof()) {
        throw Error(ErrorCode::kTruncatedStream,
                    "dump ends before " + std::string(terminator));
      }
      content += static_cast<char>(c);
      if (content.size() >= terminator.size() &&
          content.compare(content.size() - terminator.size(), terminator.size(), terminator) == 0) {
        content.resize(content.size() - terminator.size());
        return content;
      }
    }
  }

  std::istream& in_;
  std::streamoff offset_ = 0;
};

std::string normalize_title(std::string_view title) {
  std::string out;
  for (char c : title) out += c == '_' ? ' ' : c;
  const auto first = out.find_first_not_of(' ');
  if (first == std::string::npos) return {};
  out = out.substr(first, out.find_last_not_of(' ') - first + 1);
  if (is_lower_ascii(out.front())) out.front() = static_cast<char>(out.front() - 'a' + 'A');
  return out;
}

std::string index_key(std::string_view language, std::string_view title) {
  std::string key(language);
  key += '\x1f';
  key += normalize_title(title);
  return key;
}

bool main_namespace(const RawPage& page) { return page.ns.empty() || page.ns == "0"; }

}  // namespace

ExtractStats extract_comparable_articles(std::istream& dump, const std::string& pivot_language,
                                         std::vector<std::string> required_languages,
                                         const std::function<void(ComparableTuple&&)>& sink) {
  std::sort(required_languages.begin(), required_languages.end());
  required_languages.erase(std::unique(required_languages.begin(), required_languages.end()),
                           required_languages.end());

  ExtractStats stats;
  DumpReader reader(dump);
  reader.seek(dump.tellg() < 0 ? 0 : static_cast<std::streamoff>(dump.tellg()));

  struct IndexEntry {
    std::streamoff offset;
    std::string language;
  };
  std::unordered_map<std::string, IndexEntry> index;
  std::vector<std::streamoff> pivots;

  std::string language;
  while (auto page = reader.next_page(language)) {
    ++stats.pages;
    if (page->language.empty()) page->language = pivot_language;
    if (!main_namespace(*page)) continue;
    index.try_emplace(index_key(page->language, page->title),
                      IndexEntry{page->offset, page->language});
    if (page->language == pivot_language) pivots.push_back(page->offset);
  }

  auto read_at = [&](std::streamoff offset, const std::string& lang) {
    reader.seek(offset);
    std::string scratch = lang;
    auto page = reader.next_page(scratch);
    if (!page) throw Error(ErrorCode::kTruncatedStream, "indexed page vanished");
    return WikiArticle::from_wikitext(lang, std::move(page->title), std::move(page->text));
  };

  for (const auto offset : pivots) {
    ++stats.pivot_pages;
    WikiArticle pivot = read_at(offset, pivot_language);

    std::vector<const IndexEntry*> targets;
    bool has_all_links = true;
    bool resolved = true;
    for (const auto& lang : required_languages) {
      const InterlanguageLink* link = pivot.link_to(lang);
      if (link == nullptr) {
        has_all_links = false;
        break;
      }
      auto it = index.find(index_key(lang, link->title));
      if (it == index.end()) {
        resolved = false;
      } else {
        targets.push_back(&it->second);
      }
    }
    if (!has_all_links) continue;
    if (!resolved) {
      ++stats.unresolved;
      continue;
    }

    ComparableTuple tuple;
    tuple.pivot = std::move(pivot);
    for (const IndexEntry* entry : targets) {
      tuple.linked.push_back(read_at(entry->offset, entry->language));
    }
    ++stats.emitted;
    sink(std::move(tuple));
  }
  return stats;
}

}  // namespace xling::corpus

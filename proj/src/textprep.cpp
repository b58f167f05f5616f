#include "xling/textprep.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>

#include "xling/error.hpp"

namespace xling::textprep {

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point at text[pos], advancing pos. Invalid sequences
// consume one byte and yield kInvalid.
char32_t next_code_point(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  std::size_t len;
  char32_t cp;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + len > text.size()) {
    ++pos;
    return kInvalid;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto c = static_cast<unsigned char>(text[pos + i]);
    if ((c & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

enum class CharClass { kWord, kSeparator, kIgnorable };

CharClass classify(char32_t cp) {
  if (cp == kInvalid) return CharClass::kSeparator;
  if (cp < 0x80) {
    const bool alnum = (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    return alnum ? CharClass::kWord : CharClass::kSeparator;
  }
  // Arabic harakat, superscript alef, tatweel.
  if ((cp >= 0x064B && cp <= 0x065F) || cp == 0x0670 || cp == 0x0640) return CharClass::kIgnorable;
  // Soft hyphen, zero-width joiners, marks.
  if (cp == 0x00AD || (cp >= 0x200B && cp <= 0x200F) || cp == 0xFEFF) return CharClass::kIgnorable;
  const bool separator =
      (cp >= 0x0080 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
      cp == 0x060C || cp == 0x061B || cp == 0x061F || (cp >= 0x066A && cp <= 0x066D) ||
      cp == 0x06D4 || (cp >= 0x2000 && cp <= 0x2BFF) || (cp >= 0x3000 && cp <= 0x303F) ||
      cp == 0xFD3E || cp == 0xFD3F || (cp >= 0xFE30 && cp <= 0xFE4F) ||
      (cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
      (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65) ||
      (cp >= 0x1F000 && cp <= 0x1FAFF);
  return separator ? CharClass::kSeparator : CharClass::kWord;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0x80) return cp;
  if ((cp >= 0x00C0 && cp <= 0x00DE) && cp != 0x00D7) return cp + 32;
  if ((cp >= 0x0100 && cp <= 0x0137) || (cp >= 0x014A && cp <= 0x0177)) return cp | 1;
  if (cp >= 0x0139 && cp <= 0x0148 && (cp & 1)) return cp + 1;
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 32;
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 32;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 80;
  return cp;
}

std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> cps;
  for (std::size_t pos = 0; pos < text.size();) cps.push_back(next_code_point(text, pos));
  return cps;
}

std::string encode(std::span<const char32_t> cps) {
  std::string out;
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

bool ends_with(std::string_view word, std::string_view suffix) {
  return word.size() >= suffix.size() &&
         word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::vector<std::string> by_length_desc(std::vector<std::string> affixes) {
  std::erase_if(affixes, [](const std::string& a) { return a.empty(); });
  std::stable_sort(affixes.begin(), affixes.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  return affixes;
}

// Loop guard for rule sets whose fixed point might not be reached (cyclic
// user-supplied lemma tables).
constexpr int kMaxRounds = 64;

}  // namespace

ReducerKind parse_reducer_kind(std::string_view name) {
  if (name == "identity") return ReducerKind::kIdentity;
  if (name == "suffix_stemmer" || name == "stem") return ReducerKind::kSuffixStemmer;
  if (name == "lemma_table" || name == "lemma") return ReducerKind::kLemmaTable;
  if (name == "light_stemmer" || name == "light") return ReducerKind::kLightStemmer;
  if (name == "rooter" || name == "root") return ReducerKind::kRooter;
  if (name == "morphar") return ReducerKind::kMorphAr;
  throw Error(ErrorCode::kInvalidArgument, "unknown reducer: " + std::string(name));
}

std::string_view reducer_kind_name(ReducerKind kind) noexcept {
  switch (kind) {
    case ReducerKind::kIdentity: return "identity";
    case ReducerKind::kSuffixStemmer: return "suffix_stemmer";
    case ReducerKind::kLemmaTable: return "lemma_table";
    case ReducerKind::kLightStemmer: return "light_stemmer";
    case ReducerKind::kRooter: return "rooter";
    case ReducerKind::kMorphAr: return "morphar";
  }
  return "identity";
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < text.size(); ++n) next_code_point(text, pos);
  return n;
}

std::vector<Token> tokenize(std::string_view text, bool lowercase) {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back({current, current});
      current.clear();
    }
  };
  for (std::size_t pos = 0; pos < text.size();) {
    const char32_t cp = next_code_point(text, pos);
    switch (classify(cp)) {
      case CharClass::kWord:
        append_utf8(current, lowercase ? to_lower(cp) : cp);
        break;
      case CharClass::kIgnorable:
        break;
      case CharClass::kSeparator:
        flush();
        break;
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> read_word_list(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    words.push_back(line.substr(first, last - first + 1));
  }
  return words;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_word_list(in);
}

// --- SuffixStemmer -----------------------------------------------------------

SuffixStemmer::SuffixStemmer()
    : rules_{
          {"sses", "ss", 1, false, ""},
          {"ies", "y", 2, false, ""},
          {"ied", "y", 2, false, ""},
          {"ing", "", 3, true, ""},
          {"edly", "", 3, true, ""},
          {"ed", "", 3, true, ""},
          {"ly", "", 3, false, ""},
          {"s", "", 3, false, "siu"},
      } {}

bool SuffixStemmer::apply_once(std::string& word) const {
  for (const Rule& rule : rules_) {
    if (!ends_with(word, rule.suffix)) continue;
    std::string stem = word.substr(0, word.size() - rule.suffix.size());
    if (utf8_length(stem) < rule.min_stem) continue;
    if (!rule.blocked_before.empty() && !stem.empty() &&
        rule.blocked_before.find(stem.back()) != std::string::npos) {
      continue;
    }
    // "-ed"/"-ing" on a vowel-less stem ("sing", "red") is not an inflection.
    if (rule.undouble && std::none_of(stem.begin(), stem.end(), is_vowel)) continue;
    if (rule.undouble && stem.size() >= 2 && stem.back() == stem[stem.size() - 2] &&
        !is_vowel(stem.back()) && std::string_view("lsz").find(stem.back()) == std::string::npos &&
        static_cast<unsigned char>(stem.back()) < 0x80) {
      stem.pop_back();
    }
    word = stem + rule.replacement;
    return true;
  }
  return false;
}

std::string SuffixStemmer::reduce(std::string_view word) const {
  std::string current(word);
  for (int round = 0; round < kMaxRounds && apply_once(current); ++round) {
  }
  return current;
}

// --- LemmaTable --------------------------------------------------------------

LemmaTable::LemmaTable()
    : LemmaTable({
          {"am", "be"},          {"is", "be"},          {"are", "be"},
          {"was", "be"},         {"were", "be"},        {"been", "be"},
          {"has", "have"},       {"had", "have"},       {"did", "do"},
          {"does", "do"},        {"done", "do"},        {"went", "go"},
          {"gone", "go"},        {"goes", "go"},        {"wrote", "write"},
          {"written", "write"},  {"children", "child"}, {"men", "man"},
          {"women", "woman"},    {"people", "person"},  {"mice", "mouse"},
          {"feet", "foot"},      {"teeth", "tooth"},    {"better", "good"},
          {"best", "good"},      {"ran", "run"},        {"saw", "see"},
          {"seen", "see"},       {"took", "take"},      {"taken", "take"},
          {"made", "make"},      {"said", "say"},       {"gave", "give"},
          {"given", "give"},     {"came", "come"},      {"knew", "know"},
          {"known", "know"},     {"thought", "think"},  {"found", "find"},
          {"told", "tell"},      {"became", "become"},  {"left", "leave"},
          {"felt", "feel"},      {"brought", "bring"},  {"began", "begin"},
          {"begun", "begin"},    {"kept", "keep"},      {"held", "hold"},
          {"stood", "stand"},    {"heard", "hear"},     {"met", "meet"},
          {"won", "win"},        {"lost", "lose"},      {"paid", "pay"},
          {"sent", "send"},      {"built", "build"},    {"spoke", "speak"},
          {"spoken", "speak"},   {"chose", "choose"},   {"chosen", "choose"},
          {"countries", "country"}, {"lives", "life"},  {"wives", "wife"},
          {"knives", "knife"},   {"leaves", "leaf"},    {"analyses", "analysis"},
          {"crises", "crisis"},  {"data", "datum"},     {"media", "medium"},
      }) {}

LemmaTable::LemmaTable(std::unordered_map<std::string, std::string> table, SuffixStemmer fallback)
    : table_(std::move(table)), fallback_(std::move(fallback)) {}

LemmaTable LemmaTable::load(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::string> table;
  std::size_t line_no = 0;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw RecordError(ErrorCode::kMalformedRecord, line_no, "expected form<TAB>lemma");
    }
    table.try_emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return LemmaTable(std::move(table));
}

std::string LemmaTable::reduce(std::string_view word) const {
  std::string current(word);
  for (int round = 0; round < kMaxRounds; ++round) {
    auto it = table_.find(current);
    std::string next = it != table_.end() ? it->second : fallback_.reduce(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

// --- LightStemmer ------------------------------------------------------------

LightStemmer::LightStemmer()
    : LightStemmer({"وال", "بال", "كال", "فال", "لل", "ال", "سي", "و", "ي"},
                   {"ها", "ان", "ات", "ون", "ين", "يه", "ية", "ه", "ة", "ي", "ت"}, 3) {}

LightStemmer::LightStemmer(std::vector<std::string> prefixes, std::vector<std::string> suffixes,
                           std::size_t min_stem)
    : prefixes_(by_length_desc(std::move(prefixes))),
      suffixes_(by_length_desc(std::move(suffixes))),
      min_stem_(min_stem) {}

LightStemmer LightStemmer::load(const std::filesystem::path& prefix_file,
                                const std::filesystem::path& suffix_file, std::size_t min_stem) {
  return LightStemmer(load_word_list(prefix_file), load_word_list(suffix_file), min_stem);
}

bool LightStemmer::strip_prefix(std::string& word) const {
  for (const auto& prefix : prefixes_) {
    if (word.starts_with(prefix) && utf8_length(std::string_view(word).substr(prefix.size())) >= min_stem_) {
      word.erase(0, prefix.size());
      return true;
    }
  }
  return false;
}

bool LightStemmer::strip_suffix(std::string& word) const {
  for (const auto& suffix : suffixes_) {
    if (ends_with(word, suffix) &&
        utf8_length(std::string_view(word).substr(0, word.size() - suffix.size())) >= min_stem_) {
      word.resize(word.size() - suffix.size());
      return true;
    }
  }
  return false;
}

std::string LightStemmer::reduce(std::string_view word) const {
  std::string current(word);
  for (int round = 0; round < kMaxRounds; ++round) {
    const bool changed_prefix = strip_prefix(current);
    const bool changed_suffix = strip_suffix(current);
    if (!changed_prefix && !changed_suffix) break;
  }
  return current;
}

// --- Rooter ------------------------------------------------------------------

namespace {

constexpr char32_t kAlef = 0x0627;
constexpr char32_t kWaw = 0x0648;
constexpr char32_t kYeh = 0x064A;
constexpr char32_t kMeem = 0x0645;
constexpr char32_t kTeh = 0x062A;

// One infix/pattern removal step on a word longer than three letters.
bool strip_pattern_letter(std::vector<char32_t>& letters) {
  if (letters.size() <= 3) return false;
  for (char32_t vowel : {kAlef, kWaw, kYeh}) {
    for (std::size_t i = 1; i + 1 < letters.size(); ++i) {
      if (letters[i] == vowel) {
        letters.erase(letters.begin() + static_cast<std::ptrdiff_t>(i));
        return true;
      }
    }
  }
  for (char32_t lead : {kMeem, kTeh, kAlef}) {
    if (letters.front() == lead) {
      letters.erase(letters.begin());
      return true;
    }
  }
  return false;
}

}  // namespace

std::string Rooter::reduce(std::string_view word) const {
  const std::string light = light_.reduce(word);
  std::string current = light;
  for (int round = 0; round < kMaxRounds; ++round) {
    auto letters = decode(current);
    while (strip_pattern_letter(letters)) {
    }
    std::string next = light_.reduce(encode(letters));
    if (next == current) break;
    current = std::move(next);
  }
  return utf8_length(current) < 3 ? light : current;
}

std::set<std::string> morphar_lookup(std::string_view word, const bidict::BilingualDictionary& dict,
                                     const LightStemmer& light, const Rooter& root,
                                     bidict::Side side) {
  const std::string stem = light.reduce(word);
  if (dict.contains(stem, side)) return dict.translations(stem, side);
  return dict.translations(root.reduce(word), side);
}

// --- Reducer -----------------------------------------------------------------

Reducer::Reducer(ReducerKind kind, std::shared_ptr<const ReducerResources> resources,
                 const bidict::BilingualDictionary* dict, bidict::Side side)
    : kind_(kind), resources_(std::move(resources)), dict_(dict), side_(side) {
  if (kind_ == ReducerKind::kMorphAr && dict_ == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "morphar reducer requires a bilingual dictionary");
  }
  if (!resources_ && kind_ != ReducerKind::kIdentity) {
    static const auto kDefaults = std::make_shared<const ReducerResources>();
    resources_ = kDefaults;
  }
}

std::string Reducer::reduce(std::string_view word) const {
  switch (kind_) {
    case ReducerKind::kIdentity:
      return std::string(word);
    case ReducerKind::kSuffixStemmer:
      return resources_->stemmer.reduce(word);
    case ReducerKind::kLemmaTable:
      return resources_->lemmas.reduce(word);
    case ReducerKind::kLightStemmer:
      return resources_->light.reduce(word);
    case ReducerKind::kRooter:
      return resources_->rooter.reduce(word);
    case ReducerKind::kMorphAr: {
      std::string stem = resources_->light.reduce(word);
      if (dict_->contains(stem, side_)) return stem;
      std::string root = resources_->rooter.reduce(word);
      return dict_->contains(root, side_) ? root : stem;
    }
  }
  return std::string(word);
}

// --- Filters and pipeline ----------------------------------------------------

void PipelineConfig::validate() const {
  if (min_corpus_frequency < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_corpus_frequency must be at least 1");
  }
}

TermCounts count_terms(const std::vector<std::vector<Token>>& docs) {
  TermCounts counts;
  for (const auto& doc : docs) {
    for (const auto& token : doc) ++counts[token.reduced];
  }
  return counts;
}

std::vector<std::vector<Token>> apply_filters(std::vector<std::vector<Token>> docs,
                                              const PipelineConfig& config,
                                              const TermCounts& counts) {
  config.validate();
  for (auto& doc : docs) {
    std::erase_if(doc, [&](const Token& token) {
      if (config.stopwords.contains(token.surface) || config.stopwords.contains(token.reduced)) {
        return true;
      }
      if (config.min_corpus_frequency <= 1) return false;
      auto it = counts.find(token.reduced);
      return it == counts.end() || it->second < config.min_corpus_frequency;
    });
  }
  return docs;
}

Pipeline::Pipeline(bool lowercase, std::unordered_set<std::string> stopwords, Reducer reducer)
    : lowercase_(lowercase), stopwords_(std::move(stopwords)), reducer_(std::move(reducer)) {}

std::vector<Token> Pipeline::analyze(std::string_view text) const {
  std::vector<Token> tokens = tokenize(text, lowercase_);
  std::erase_if(tokens, [&](const Token& t) { return stopwords_.contains(t.surface); });
  for (auto& token : tokens) {
    token.reduced = reducer_.reduce(token.surface);
    if (token.reduced.empty()) token.reduced = token.surface;
  }
  std::erase_if(tokens, [&](const Token& t) { return stopwords_.contains(t.reduced); });
  return tokens;
}

std::vector<std::string> Pipeline::terms(std::string_view text) const {
  std::vector<std::string> out;
  for (auto& token : analyze(text)) out.push_back(std::move(token.reduced));
  return out;
}

std::vector<std::vector<std::string>> analyze_corpus(const Pipeline& pipeline,
                                                     const std::vector<std::string>& texts,
                                                     std::size_t min_corpus_frequency) {
  std::vector<std::vector<Token>> docs;
  docs.reserve(texts.size());
  for (const auto& text : texts) docs.push_back(pipeline.analyze(text));

  PipelineConfig config;
  config.min_corpus_frequency = min_corpus_frequency;
  if (min_corpus_frequency > 1) docs = apply_filters(std::move(docs), config, count_terms(docs));

  std::vector<std::vector<std::string>> out(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (auto& token : docs[i]) out[i].push_back(std::move(token.reduced));
  }
  return out;
}

}  // namespace xling::textprep

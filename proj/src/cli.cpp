#include "xling/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xling/bidict.hpp"
#include "xling/corpus.hpp"
#include "xling/error.hpp"
#include "xling/lsi.hpp"
#include "xling/retrieval.hpp"
#include "xling/textprep.hpp"
#include "xling/wiki.hpp"

namespace xling::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using bidict::Side;
using retrieval::TokenDoc;

// --- shared helpers ----------------------------------------------------------

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 14695981039346656037ull) {
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << value;
  return s.str();
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::uint64_t hash = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    hash = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), hash);
  }
  return hex64(hash);
}

// Relative inputs missing from the working directory are looked up under
// $XLING_DATA_DIR.
fs::path resolve_input(const std::string& name) {
  fs::path path(name);
  if (path.is_absolute() || fs::exists(path)) return path;
  if (const char* dir = std::getenv("XLING_DATA_DIR"); dir != nullptr && *dir != '\0') {
    fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate;
  }
  return path;
}

// Writes through a temporary sibling and renames, so a failed run never
// leaves a partial file behind.
void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
      body(out);
      out.flush();
      if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void write_output(const std::string& path, std::ostream& stdout_stream,
                  const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(stdout_stream);
  } else {
    write_atomically(path, body);
  }
}

std::string format_number(double value) { return json(value).dump(); }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Effective option values of a subcommand, sorted by name.
json effective_config(const CLI::App& sub) {
  std::map<std::string, std::string> values;
  for (const CLI::Option* opt : sub.get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty()) continue;
    const std::string& name = names.front();
    if (name == "help" || name == "config" || name == "manifest") continue;
    if (opt->count() > 0) {
      const auto results = opt->reduced_results();
      std::string joined;
      for (std::size_t i = 0; i < results.size(); ++i) joined += (i ? "," : "") + results[i];
      values[name] = opt->get_type_size() == 0 && joined.empty() ? "true" : joined;
    } else {
      values[name] = opt->get_default_str();
    }
  }
  json j = json::object();
  for (const auto& [k, v] : values) j[k] = v;
  return j;
}

void write_manifest(const fs::path& path, const std::string& command, const CLI::App& sub,
                    const std::vector<fs::path>& inputs, json extra) {
  json config = effective_config(sub);
  json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["config_hash"] = hex64(fnv1a(config.dump()));
  json in = json::array();
  for (const auto& p : inputs) in.push_back({{"path", p.string()}, {"fnv1a64", file_hash(p)}});
  manifest["inputs"] = in;
  for (auto& [k, v] : extra.items()) manifest[k] = v;
  manifest["created"] = utc_timestamp();
  write_atomically(path, [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });
}

void warn(std::ostream& err, const std::string& message) { err << "warning: " << message << '\n'; }

// --- preprocessing -------------------------------------------------------------

struct PipelineOptions {
  bool lowercase = true;
  std::string stopwords_source;
  std::string stopwords_target;
  std::string reducer_source = "identity";
  std::string reducer_target = "identity";
  std::size_t min_freq = 1;
  std::string dictionary;
  std::string prefixes;
  std::string suffixes;
  std::string lemmas;
  std::string source_language = "en";
  std::string target_language = "ar";
};

void add_pipeline_options(CLI::App* sub, PipelineOptions& o) {
  sub->add_flag("--lowercase,!--no-lowercase", o.lowercase, "Lowercase tokens")
      ->capture_default_str();
  sub->add_option("--stopwords-source", o.stopwords_source, "Source stopword list");
  sub->add_option("--stopwords-target", o.stopwords_target, "Target stopword list");
  const std::vector<std::string> reducers = {"identity", "stem",  "suffix_stemmer", "lemma",
                                             "lemma_table", "light", "light_stemmer", "root",
                                             "rooter", "morphar"};
  sub->add_option("--reducer-source", o.reducer_source, "Source word reducer")
      ->check(CLI::IsMember(reducers))
      ->capture_default_str();
  sub->add_option("--reducer-target", o.reducer_target, "Target word reducer")
      ->check(CLI::IsMember(reducers))
      ->capture_default_str();
  sub->add_option("--min-freq", o.min_freq, "Minimum corpus frequency of a training term")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--dict", o.dictionary, "Bilingual dictionary (TSV synsets)");
  sub->add_option("--light-prefixes", o.prefixes, "Light stemmer prefix list");
  sub->add_option("--light-suffixes", o.suffixes, "Light stemmer suffix list");
  sub->add_option("--lemmas", o.lemmas, "Lemma table (form<TAB>lemma)");
  sub->add_option("--source-lang", o.source_language, "Source language code")
      ->capture_default_str();
  sub->add_option("--target-lang", o.target_language, "Target language code")
      ->capture_default_str();
}

class Preprocessor {
 public:
  explicit Preprocessor(const PipelineOptions& o) : options_(o) {
    if (!o.dictionary.empty()) {
      dict_ = std::make_shared<bidict::BilingualDictionary>(
          bidict::BilingualDictionary::load(resolve_input(o.dictionary)));
    }
    auto resources = std::make_shared<textprep::ReducerResources>();
    if (!o.prefixes.empty() || !o.suffixes.empty()) {
      if (o.prefixes.empty() || o.suffixes.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "--light-prefixes and --light-suffixes must be given together");
      }
      resources->light =
          textprep::LightStemmer::load(resolve_input(o.prefixes), resolve_input(o.suffixes));
      resources->rooter = textprep::Rooter(resources->light);
    }
    if (!o.lemmas.empty()) resources->lemmas = textprep::LemmaTable::load(resolve_input(o.lemmas));
    source_ = make(o.reducer_source, o.stopwords_source, resources, Side::kSource);
    target_ = make(o.reducer_target, o.stopwords_target, resources, Side::kTarget);
  }

  const textprep::Pipeline& pipeline(Side side) const {
    return side == Side::kSource ? source_ : target_;
  }
  std::shared_ptr<const bidict::BilingualDictionary> dictionary() const { return dict_; }
  std::size_t min_freq() const noexcept { return options_.min_freq; }

  std::vector<std::vector<std::string>> training_terms(const std::vector<corpus::Document>& docs,
                                                       Side side) const {
    std::vector<std::string> texts;
    texts.reserve(docs.size());
    for (const auto& d : docs) texts.push_back(d.text);
    return textprep::analyze_corpus(pipeline(side), texts, options_.min_freq);
  }

  std::vector<TokenDoc> token_docs(const std::vector<corpus::Document>& docs, Side side,
                                   const std::string& group_by = "none") const {
    std::vector<TokenDoc> out;
    out.reserve(docs.size());
    for (const auto& d : docs) {
      out.push_back({d.id, pipeline(side).terms(d.text), group_of(d, group_by)});
    }
    return out;
  }

 private:
  static std::optional<std::string> group_of(const corpus::Document& doc,
                                             const std::string& group_by) {
    if (group_by == "none") return std::nullopt;
    if (group_by == "category") return doc.category;
    if (!doc.group_key) return std::nullopt;
    if (group_by == "month") {
      const std::string& key = *doc.group_key;
      const bool dated = key.size() >= 7 && std::isdigit(static_cast<unsigned char>(key[0])) &&
                         key[4] == '-' && std::isdigit(static_cast<unsigned char>(key[5]));
      return dated ? key.substr(0, 7) : key;
    }
    return doc.group_key;
  }

  textprep::Pipeline make(const std::string& reducer, const std::string& stopword_file,
                          const std::shared_ptr<textprep::ReducerResources>& resources,
                          Side side) const {
    const auto kind = textprep::parse_reducer_kind(reducer);
    if (kind == textprep::ReducerKind::kMorphAr && !dict_) {
      throw Error(ErrorCode::kInvalidArgument, "the morphar reducer requires --dict");
    }
    std::unordered_set<std::string> stopwords;
    if (!stopword_file.empty()) {
      for (auto& w : textprep::load_word_list(resolve_input(stopword_file))) {
        stopwords.insert(std::move(w));
      }
    }
    return textprep::Pipeline(options_.lowercase, std::move(stopwords),
                              textprep::Reducer(kind, resources, dict_.get(), side));
  }

  PipelineOptions options_;
  std::shared_ptr<bidict::BilingualDictionary> dict_;
  textprep::Pipeline source_;
  textprep::Pipeline target_;
};

corpus::AlignedCorpus load_corpus(const std::string& path, const std::string& format,
                                  const PipelineOptions& p) {
  corpus::LoadOptions load;
  load.source_language = p.source_language;
  load.target_language = p.target_language;
  corpus::AlignedCorpus c =
      corpus::load_aligned_corpus(resolve_input(path), corpus::parse_corpus_format(format), load);
  c.validate();
  if (c.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus " + path + " has no couples");
  return c;
}

retrieval::GoldMapping couple_gold(const corpus::AlignedCorpus& c) {
  retrieval::GoldMapping gold;
  for (std::size_t i = 0; i < c.size(); ++i) gold[c.source_docs[i].id] = c.target_docs[i].id;
  return gold;
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v < 1) {
      throw Error(ErrorCode::kInvalidArgument, "invalid recall depth '" + item + "'");
    }
    ks.push_back(static_cast<std::size_t>(v));
  }
  if (ks.empty()) throw Error(ErrorCode::kInvalidArgument, "no recall depths given");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

// --- ingest ------------------------------------------------------------------

struct SideStats {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::set<std::string> vocabulary;
};

std::size_t count_sentences(const std::string& text) {
  static const std::vector<std::string> kEnders = {".", "!", "?", "\xD8\x9F"};
  std::size_t count = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.size();
    std::size_t len = 0;
    for (const auto& e : kEnders) {
      const auto pos = text.find(e, start);
      if (pos < end) {
        end = pos;
        len = e.size();
      }
    }
    if (!textprep::tokenize(std::string_view(text).substr(start, end - start)).empty()) ++count;
    start = end + std::max<std::size_t>(len, 1);
  }
  return count;
}

void accumulate(SideStats& stats, const corpus::Document& doc) {
  ++stats.documents;
  stats.sentences += count_sentences(doc.text);
  for (auto& token : textprep::tokenize(doc.text)) {
    ++stats.words;
    stats.vocabulary.insert(std::move(token.surface));
  }
}

json side_json(const SideStats& s) {
  return {{"documents", s.documents},
          {"sentences", s.sentences},
          {"words", s.words},
          {"vocabulary", s.vocabulary.size()}};
}

struct IngestOptions {
  std::string format = "pairdirs";
  std::string input;
  std::string output;
  std::string stats;
  std::string pivot;
  std::string manifest;
};

int cmd_ingest(const CLI::App& sub, const IngestOptions& o, const PipelineOptions& p,
               std::ostream& out, std::ostream& err) {
  const fs::path input = resolve_input(o.input);
  corpus::AlignedCorpus c;
  json extra = json::object();
  if (o.format == "wikidump") {
    std::ifstream dump(input, std::ios::binary);
    if (!dump) throw Error(ErrorCode::kIo, "cannot open " + input.string());
    const std::string pivot = o.pivot.empty() ? p.source_language : o.pivot;
    const std::string other = pivot == p.source_language ? p.target_language : p.source_language;
    const auto stats = corpus::extract_comparable_articles(
        dump, pivot, {other}, [&](corpus::ComparableTuple&& t) {
          const corpus::WikiArticle& linked = t.linked.front();
          corpus::Document a{t.pivot.language + ":" + t.pivot.title, t.pivot.language,
                             corpus::strip_wiki_markup(t.pivot.wikitext), std::nullopt, std::nullopt};
          corpus::Document b{linked.language + ":" + linked.title, linked.language,
                             corpus::strip_wiki_markup(linked.wikitext), std::nullopt, std::nullopt};
          a.degenerate = a.text.empty();
          b.degenerate = b.text.empty();
          if (pivot == p.source_language) {
            c.push_back(std::move(a), std::move(b));
          } else {
            c.push_back(std::move(b), std::move(a));
          }
        });
    extra["dump"] = {{"pages", stats.pages},
                     {"pivot_pages", stats.pivot_pages},
                     {"emitted", stats.emitted},
                     {"unresolved", stats.unresolved}};
    if (stats.unresolved > 0) {
      warn(err, std::to_string(stats.unresolved) + " pivot pages link to titles missing from the dump");
    }
  } else {
    corpus::LoadOptions load;
    load.source_language = p.source_language;
    load.target_language = p.target_language;
    c = corpus::load_aligned_corpus(input, corpus::parse_corpus_format(o.format), load);
  }
  c.validate();

  SideStats source;
  SideStats target;
  for (std::size_t i = 0; i < c.size(); ++i) {
    accumulate(source, c.source_docs[i]);
    accumulate(target, c.target_docs[i]);
  }
  json stats;
  stats["couples"] = c.size();
  stats["source"] = side_json(source);
  stats["target"] = side_json(target);
  for (auto& [k, v] : extra.items()) stats[k] = v;

  write_output(o.output, out, [&](std::ostream& s) { corpus::write_corpus_jsonl(c, s); });
  const std::string stats_path =
      !o.stats.empty() ? o.stats : (o.output.empty() || o.output == "-" ? "" : o.output + ".stats.json");
  if (stats_path.empty()) {
    err << stats.dump() << '\n';
  } else {
    write_atomically(stats_path, [&](std::ostream& s) { s << stats.dump(2) << '\n'; });
  }
  if (!o.manifest.empty()) write_manifest(o.manifest, "ingest", sub, {input}, {{"stats", stats}});
  return kExitOk;
}

// --- train -------------------------------------------------------------------

struct TrainOptions {
  std::string corpus;
  std::string format = "jsonl";
  std::string kind = "cross";
  std::string side = "target";
  int k = 300;
  double split = 0.9;
  std::uint64_t seed = 42;
  std::string output;
  std::string test_out;
  std::string manifest;
};

int cmd_train(const CLI::App& sub, const TrainOptions& o, const PipelineOptions& p,
              std::ostream& out, std::ostream& err) {
  const Preprocessor prep(p);
  const corpus::AlignedCorpus c = load_corpus(o.corpus, o.format, p);
  corpus::CorpusSplit split;
  if (o.split >= 1.0) {
    split.train = c;
  } else {
    split = corpus::split_corpus(c, o.split, o.seed);
  }

  lsi::SvdOptions svd;
  svd.seed = o.seed;
  lsi::TrainResult result;
  if (lsi::parse_model_kind(o.kind) == lsi::ModelKind::kCrosslingual) {
    result = lsi::train_crosslingual(prep.training_terms(split.train.source_docs, Side::kSource),
                                     prep.training_terms(split.train.target_docs, Side::kTarget),
                                     o.k, p.source_language, p.target_language, svd);
  } else {
    const Side side = o.side == "source" ? Side::kSource : Side::kTarget;
    const auto& docs = side == Side::kSource ? split.train.source_docs : split.train.target_docs;
    result = lsi::train_monolingual(prep.training_terms(docs, side), o.k,
                                    side == Side::kSource ? p.source_language : p.target_language,
                                    svd);
  }
  if (result.clamped) {
    warn(err, "k=" + std::to_string(o.k) + " exceeds the matrix rank; using k=" +
                  std::to_string(result.model.k()));
  }

  write_atomically(o.output, [&](std::ostream& s) { lsi::save_model(result.model, s); });
  const std::string test_path = o.test_out.empty() ? o.output + ".test.jsonl" : o.test_out;
  write_atomically(test_path, [&](std::ostream& s) { corpus::write_corpus_jsonl(split.test, s); });

  json extra;
  extra["seed"] = o.seed;
  extra["model"] = {{"path", o.output},
                    {"fnv1a64", file_hash(o.output)},
                    {"kind", std::string(lsi::model_kind_name(result.model.kind))},
                    {"k_requested", o.k},
                    {"k", result.model.k()},
                    {"clamped", result.clamped},
                    {"rows", result.model.dimension()},
                    {"documents", result.model.documents()},
                    {"svd_iterations", result.iterations},
                    {"svd_residual", result.residual}};
  extra["split"] = {{"train", split.train.size()}, {"test", split.test.size()}, {"test_path", test_path}};
  write_manifest(o.manifest.empty() ? o.output + ".manifest.json" : o.manifest, "train", sub,
                 {resolve_input(o.corpus)}, extra);
  out << "model " << o.output << " kind=" << lsi::model_kind_name(result.model.kind)
      << " k=" << result.model.k() << " rows=" << result.model.dimension()
      << " documents=" << result.model.documents() << " test=" << split.test.size() << '\n';
  return kExitOk;
}

// --- retrieve / eval -----------------------------------------------------------

struct RetrieveOptions {
  std::string model;
  std::string corpus;
  std::string format = "jsonl";
  std::string provider = "identity";
  std::string cache;
  std::string store;
  std::string save_store;
  std::size_t n = 5;
  std::string ks = "1,5";
  std::string output;
  std::string report;
  std::string manifest;
  bool oracle = false;
};

std::unique_ptr<retrieval::TranslationProvider> make_provider(const RetrieveOptions& o,
                                                              const Preprocessor& prep) {
  if (o.provider == "identity") return std::make_unique<retrieval::IdentityProvider>();
  if (o.provider == "dict") {
    if (!prep.dictionary()) throw Error(ErrorCode::kInvalidArgument, "--provider dict requires --dict");
    return std::make_unique<retrieval::DictionaryProvider>(prep.dictionary());
  }
  if (o.cache.empty()) throw Error(ErrorCode::kInvalidArgument, "--provider cache requires --cache");
  std::unordered_map<std::string, std::vector<std::string>> cache;
  for (const auto& doc : corpus::load_documents_jsonl(resolve_input(o.cache), "")) {
    cache[doc.id] = prep.pipeline(Side::kTarget).terms(doc.text);
  }
  return std::make_unique<retrieval::CachedProvider>(std::move(cache));
}

std::vector<retrieval::RankedList> run_retrieval(const RetrieveOptions& o, const Preprocessor& prep,
                                                 const lsi::LsiModel& model,
                                                 const corpus::AlignedCorpus& c) {
  const auto queries = prep.token_docs(c.source_docs, Side::kSource);
  retrieval::EmbeddingSet candidates;
  if (!o.store.empty()) {
    candidates = retrieval::load_embeddings(resolve_input(o.store));
    if (candidates.dimension() != model.k()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "vector store dimension " + std::to_string(candidates.dimension()) +
                      " does not match model k=" + std::to_string(model.k()));
    }
  } else {
    const Side side = model.kind == lsi::ModelKind::kCrosslingual ? Side::kTarget : Side::kSource;
    candidates = retrieval::embed_documents(prep.token_docs(c.target_docs, Side::kTarget), model, side);
  }
  if (!o.save_store.empty()) retrieval::save_embeddings(candidates, o.save_store);
  if (model.kind == lsi::ModelKind::kCrosslingual) {
    return retrieval::retrieve_cl_lsi(queries, candidates, model, o.n);
  }
  return retrieval::retrieve_ar_lsi(queries, candidates, model, *make_provider(o, prep), o.n);
}

int cmd_retrieve(const CLI::App& sub, const RetrieveOptions& o, const PipelineOptions& p,
                 std::ostream& out, std::ostream& err) {
  const Preprocessor prep(p);
  const lsi::LsiModel model = lsi::load_model(resolve_input(o.model));
  const corpus::AlignedCorpus c = load_corpus(o.corpus, o.format, p);
  const auto lists = run_retrieval(o, prep, model, c);
  std::size_t skipped = 0;
  for (const auto& l : lists) skipped += l.skipped ? 1 : 0;
  if (skipped > 0) warn(err, std::to_string(skipped) + " queries skipped by the translation provider");

  write_output(o.output, out, [&](std::ostream& s) { retrieval::write_ranked_lists_jsonl(lists, s); });
  json extra = json::object();
  if (!o.report.empty()) {
    const auto report = retrieval::retrieval_report(lists, couple_gold(c), parse_ks(o.ks));
    write_atomically(o.report, [&](std::ostream& s) { retrieval::write_report_json(report, s); });
    for (const auto& [k, r] : report.recall) extra["R@" + std::to_string(k)] = r;
  }
  if (!o.manifest.empty()) {
    write_manifest(o.manifest, "retrieve", sub, {resolve_input(o.model), resolve_input(o.corpus)}, extra);
  }
  return kExitOk;
}

int cmd_eval(const CLI::App& sub, const RetrieveOptions& o, const PipelineOptions& p,
             std::ostream& out, std::ostream&) {
  const Preprocessor prep(p);
  const lsi::LsiModel model = lsi::load_model(resolve_input(o.model));
  const corpus::AlignedCorpus c = load_corpus(o.corpus, o.format, p);
  json extra = json::object();
  if (o.oracle) {
    const bool cross = model.kind == lsi::ModelKind::kCrosslingual;
    const Side text_side = cross || model.source_language == p.target_language ? Side::kTarget
                                                                               : Side::kSource;
    const auto& docs = text_side == Side::kTarget ? c.target_docs : c.source_docs;
    const double r1 = retrieval::oracle_experiment(prep.token_docs(docs, text_side), model,
                                                   cross ? Side::kTarget : Side::kSource);
    out << "R@1 " << format_number(r1) << '\n';
    extra["oracle"] = {{"documents", docs.size()}, {"R@1", r1}};
    if (!o.report.empty()) {
      write_atomically(o.report, [&](std::ostream& s) { s << extra.dump(2) << '\n'; });
    }
  } else {
    const auto lists = run_retrieval(o, prep, model, c);
    const auto report = retrieval::retrieval_report(lists, couple_gold(c), parse_ks(o.ks));
    for (const auto& [k, r] : report.recall) {
      out << "R@" << k << ' ' << format_number(r) << '\n';
      extra["R@" + std::to_string(k)] = r;
    }
    if (!o.report.empty()) {
      write_atomically(o.report, [&](std::ostream& s) { retrieval::write_report_json(report, s); });
    }
  }
  if (!o.manifest.empty()) {
    write_manifest(o.manifest, "eval", sub, {resolve_input(o.model), resolve_input(o.corpus)}, extra);
  }
  return kExitOk;
}

// --- align -------------------------------------------------------------------

struct AlignCliOptions {
  std::string model;
  std::string corpus;
  std::string format = "jsonl";
  std::string source;
  std::string target;
  std::size_t top_n = 15;
  std::string group_by = "none";
  bool mutual_best = false;
  std::string output;
  std::string report;
  std::string ranges_csv;
  std::string histogram_csv;
  std::string manifest;
};

int cmd_align(const CLI::App& sub, const AlignCliOptions& o, const PipelineOptions& p,
              std::ostream& out, std::ostream& err) {
  const Preprocessor prep(p);
  const lsi::LsiModel model = lsi::load_model(resolve_input(o.model));
  std::vector<corpus::Document> sources;
  std::vector<corpus::Document> targets;
  std::optional<retrieval::GoldMapping> gold;
  std::vector<fs::path> inputs = {resolve_input(o.model)};
  if (!o.corpus.empty()) {
    if (!o.source.empty() || !o.target.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "use either --corpus or --source/--target");
    }
    corpus::AlignedCorpus c = load_corpus(o.corpus, o.format, p);
    gold = couple_gold(c);
    sources = std::move(c.source_docs);
    targets = std::move(c.target_docs);
    inputs.push_back(resolve_input(o.corpus));
  } else {
    if (o.source.empty() || o.target.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "align needs --corpus or both --source and --target");
    }
    sources = corpus::load_documents_jsonl(resolve_input(o.source), p.source_language);
    targets = corpus::load_documents_jsonl(resolve_input(o.target), p.target_language);
    inputs.push_back(resolve_input(o.source));
    inputs.push_back(resolve_input(o.target));
  }

  retrieval::AlignOptions options;
  options.top_n = o.top_n;
  options.grouped = o.group_by != "none";
  options.mutual_best = o.mutual_best;
  std::vector<std::string> warnings;
  const auto pairs = retrieval::align_corpora(prep.token_docs(sources, Side::kSource, o.group_by),
                                              prep.token_docs(targets, Side::kTarget, o.group_by),
                                              model, options, &warnings);
  for (const auto& w : warnings) warn(err, w);

  write_output(o.output, out, [&](std::ostream& s) { retrieval::write_alignment_tsv(pairs, s); });
  json extra = {{"pairs", pairs.size()}};
  if (!pairs.empty() && (!o.report.empty() || !o.ranges_csv.empty() || !o.histogram_csv.empty())) {
    const auto report = retrieval::alignment_report(pairs, gold ? &*gold : nullptr);
    if (report.accuracy) extra["accuracy"] = *report.accuracy;
    if (!o.report.empty()) {
      write_atomically(o.report, [&](std::ostream& s) { retrieval::write_report_json(report, s); });
    }
    if (!o.ranges_csv.empty()) {
      write_atomically(o.ranges_csv, [&](std::ostream& s) { retrieval::write_ranges_csv(report, s); });
    }
    if (!o.histogram_csv.empty()) {
      write_atomically(o.histogram_csv,
                       [&](std::ostream& s) { retrieval::write_histogram_csv(report, s); });
    }
  }
  if (!o.manifest.empty()) write_manifest(o.manifest, "align", sub, inputs, extra);
  return kExitOk;
}

// --- score -------------------------------------------------------------------

struct ScoreOptions {
  std::string corpus;
  std::string format = "jsonl";
  std::string measure = "bin";
  std::string output;
};

int cmd_score(const ScoreOptions& o, const PipelineOptions& p, std::ostream& out, std::ostream& err) {
  const Preprocessor prep(p);
  if (!prep.dictionary()) throw Error(ErrorCode::kInvalidArgument, "score requires --dict");
  const auto& dict = *prep.dictionary();
  const corpus::AlignedCorpus c = load_corpus(o.corpus, o.format, p);
  std::vector<std::vector<std::string>> src;
  std::vector<std::vector<std::string>> tgt;
  for (std::size_t i = 0; i < c.size(); ++i) {
    src.push_back(prep.pipeline(Side::kSource).terms(c.source_docs[i].text));
    tgt.push_back(prep.pipeline(Side::kTarget).terms(c.target_docs[i].text));
  }
  std::optional<vsm::Vocabulary> src_stats;
  std::optional<vsm::Vocabulary> tgt_stats;
  if (o.measure == "cos") {
    src_stats = vsm::Vocabulary::build(src);
    tgt_stats = vsm::Vocabulary::build(tgt);
  }
  double total = 0.0;
  std::size_t scored = 0;
  write_output(o.output, out, [&](std::ostream& s) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      double value = 0.0;
      try {
        if (o.measure == "bin") value = bidict::bin_symmetric(src[i], tgt[i], dict);
        else if (o.measure == "bin-source") value = bidict::bin_measure(src[i], tgt[i], dict, Side::kSource);
        else if (o.measure == "bin-pooled") value = bidict::bin_pooled(src[i], tgt[i], dict);
        else if (o.measure == "cos") value = bidict::dict_cosine(src[i], tgt[i], dict, *src_stats, *tgt_stats);
        else if (o.measure == "oov") value = bidict::oov_rate(src[i], tgt[i], dict);
        else value = bidict::matching_rate(src[i], tgt[i], dict);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedRate) throw;
        warn(err, c.source_docs[i].id + ": " + e.what());
        s << c.source_docs[i].id << '\t' << c.target_docs[i].id << "\tnan\n";
        continue;
      }
      total += value;
      ++scored;
      s << c.source_docs[i].id << '\t' << c.target_docs[i].id << '\t' << format_number(value) << '\n';
    }
  });
  if (scored > 0) {
    err << "mean " << o.measure << ' ' << format_number(total / static_cast<double>(scored)) << '\n';
  }
  return kExitOk;
}

// --- config files ------------------------------------------------------------

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// key = value lines become `--key=value` arguments placed before the
// explicit ones, so the command line wins. Unknown keys are rejected.
std::vector<std::string> config_arguments(const fs::path& path, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file " + path.string());
  std::vector<std::string> args;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw RecordError(ErrorCode::kMalformedRecord, line_no, "expected key = value in " + path.string());
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    std::string value = trim(std::string_view(content).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const CLI::Option* opt = key.empty() ? nullptr : sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config" || key == "help") {
      throw RecordError(ErrorCode::kInvalidArgument, line_no,
                        "unknown config key '" + key + "' for " + sub.get_name());
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kExitUsage;
    case ErrorKind::kData: return kExitData;
    case ErrorKind::kNumerical: return kExitNumerical;
  }
  return kExitNumerical;
}

int report_error(std::ostream& err, std::string_view code, std::string_view kind, int exit_code,
                 const std::string& message) {
  json j;
  j["error"] = {{"code", code}, {"kind", kind}, {"exit_code", exit_code}, {"message", message}};
  err << j.dump() << '\n';
  return exit_code;
}

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kData: return "data";
    case ErrorKind::kNumerical: return "numerical";
  }
  return "internal";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-lingual document similarity and alignment", "xling"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  PipelineOptions pipeline;
  std::string config_path;

  IngestOptions ingest;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Convert a raw corpus into aligned jsonl");
  ingest_cmd->add_option("--format", ingest.format, "Input format")
      ->check(CLI::IsMember({"pairdirs", "jsonl", "wikidump"}))
      ->capture_default_str();
  ingest_cmd->add_option("--input", ingest.input, "Input directory or file")->required();
  ingest_cmd->add_option("--output", ingest.output, "Output jsonl corpus ('-' for stdout)")->required();
  ingest_cmd->add_option("--stats", ingest.stats, "Corpus statistics JSON");
  ingest_cmd->add_option("--pivot", ingest.pivot, "Pivot language of a dump (default: source)");
  ingest_cmd->add_option("--manifest", ingest.manifest, "Run manifest path");

  TrainOptions train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train an LSI model on the training split");
  train_cmd->add_option("--corpus", train.corpus, "Aligned corpus")->required();
  train_cmd->add_option("--format", train.format, "Corpus format")
      ->check(CLI::IsMember({"pairdirs", "jsonl"}))
      ->capture_default_str();
  train_cmd->add_option("--kind", train.kind, "Model kind")
      ->check(CLI::IsMember({"mono", "cross"}))
      ->capture_default_str();
  train_cmd->add_option("--side", train.side, "Language side of a monolingual model")
      ->check(CLI::IsMember({"source", "target"}))
      ->capture_default_str();
  train_cmd->add_option("--k", train.k, "LSI rank")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--split", train.split, "Training fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--output", train.output, "Model file")->required();
  train_cmd->add_option("--test-out", train.test_out, "Test split jsonl (default: MODEL.test.jsonl)");
  train_cmd->add_option("--manifest", train.manifest, "Manifest (default: MODEL.manifest.json)");

  RetrieveOptions retrieve;
  CLI::App* retrieve_cmd = app.add_subcommand("retrieve", "Rank target documents for each source document");
  RetrieveOptions eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Recall at k, or the self-retrieval oracle");
  for (auto [cmd, o] : {std::pair{retrieve_cmd, &retrieve}, std::pair{eval_cmd, &eval}}) {
    cmd->add_option("--model", o->model, "Model file")->required();
    cmd->add_option("--corpus", o->corpus, "Aligned test corpus")->required();
    cmd->add_option("--format", o->format, "Corpus format")
        ->check(CLI::IsMember({"pairdirs", "jsonl"}))
        ->capture_default_str();
    cmd->add_option("--provider", o->provider, "Query translation for monolingual models")
        ->check(CLI::IsMember({"identity", "dict", "cache"}))
        ->capture_default_str();
    cmd->add_option("--cache", o->cache, "Cached translations (documents jsonl)");
    cmd->add_option("--store", o->store, "Precomputed candidate vector store");
    cmd->add_option("--n", o->n, "Results per query")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--ks", o->ks, "Recall depths")->capture_default_str();
    cmd->add_option("--report", o->report, "Evaluation report JSON");
    cmd->add_option("--manifest", o->manifest, "Run manifest path");
  }
  retrieve_cmd->add_option("--output", retrieve.output, "Ranked lists jsonl (default: stdout)");
  retrieve_cmd->add_option("--save-store", retrieve.save_store, "Write candidate vectors to a store");
  eval_cmd->add_flag("--oracle", eval.oracle, "Query each target document against its own collection");

  AlignCliOptions align;
  CLI::App* align_cmd = app.add_subcommand("align", "Align comparable documents");
  align_cmd->add_option("--model", align.model, "Cross-lingual model file")->required();
  align_cmd->add_option("--corpus", align.corpus, "Aligned corpus (enables accuracy)");
  align_cmd->add_option("--format", align.format, "Corpus format")
      ->check(CLI::IsMember({"pairdirs", "jsonl"}))
      ->capture_default_str();
  align_cmd->add_option("--source", align.source, "Source documents jsonl");
  align_cmd->add_option("--target", align.target, "Target documents jsonl");
  align_cmd->add_option("--top-n", align.top_n, "Pairs kept per group")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  align_cmd->add_option("--group-by", align.group_by, "Partition key")
      ->check(CLI::IsMember({"none", "month", "group", "category"}))
      ->capture_default_str();
  align_cmd->add_flag("--mutual-best", align.mutual_best,
                      "Keep only pairs that are each other's best match (extension)");
  align_cmd->add_option("--output", align.output, "Aligned pairs TSV (default: stdout)");
  align_cmd->add_option("--report", align.report, "Report JSON");
  align_cmd->add_option("--ranges-csv", align.ranges_csv, "Per-group similarity ranges CSV");
  align_cmd->add_option("--histogram-csv", align.histogram_csv, "Similarity histogram CSV");
  align_cmd->add_option("--manifest", align.manifest, "Run manifest path");

  ScoreOptions score;
  CLI::App* score_cmd = app.add_subcommand("score", "Dictionary-based similarity of each couple");
  score_cmd->add_option("--corpus", score.corpus, "Aligned corpus")->required();
  score_cmd->add_option("--format", score.format, "Corpus format")
      ->check(CLI::IsMember({"pairdirs", "jsonl"}))
      ->capture_default_str();
  score_cmd->add_option("--measure", score.measure, "Measure")
      ->check(CLI::IsMember({"bin", "bin-source", "bin-pooled", "cos", "oov", "match"}))
      ->capture_default_str();
  score_cmd->add_option("--output", score.output, "Scores TSV (default: stdout)");

  for (CLI::App* cmd : {ingest_cmd, train_cmd, retrieve_cmd, eval_cmd, align_cmd, score_cmd}) {
    add_pipeline_options(cmd, pipeline);
    cmd->add_option("--config", config_path, "key = value file with option defaults");
  }

  try {
    std::vector<std::string> argv = args;
    // Splice config-file options in front of the explicit arguments.
    for (std::size_t i = 0; i < argv.size(); ++i) {
      std::string path;
      if (argv[i] == "--config" && i + 1 < argv.size()) {
        path = argv[i + 1];
      } else if (argv[i].rfind("--config=", 0) == 0) {
        path = argv[i].substr(9);
      } else {
        continue;
      }
      const auto sub_it = std::find_if(argv.begin(), argv.end(), [&](const std::string& a) {
        return app.get_subcommand_no_throw(a) != nullptr;
      });
      if (sub_it == argv.end()) {
        throw Error(ErrorCode::kInvalidArgument, "--config must follow a subcommand");
      }
      const auto extra = config_arguments(resolve_input(path), *app.get_subcommand(*sub_it));
      argv.insert(sub_it + 1, extra.begin(), extra.end());
      break;
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, "usage", "usage", kExitUsage, e.what());
  } catch (const Error& e) {
    return report_error(err, error_code_name(e.code()), kind_name(e.kind()), exit_code_for(e.kind()),
                        e.what());
  }

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(*ingest_cmd, ingest, pipeline, out, err);
    if (train_cmd->parsed()) return cmd_train(*train_cmd, train, pipeline, out, err);
    if (retrieve_cmd->parsed()) return cmd_retrieve(*retrieve_cmd, retrieve, pipeline, out, err);
    if (eval_cmd->parsed()) return cmd_eval(*eval_cmd, eval, pipeline, out, err);
    if (align_cmd->parsed()) return cmd_align(*align_cmd, align, pipeline, out, err);
    return cmd_score(score, pipeline, out, err);
  } catch (const Error& e) {
    return report_error(err, error_code_name(e.code()), kind_name(e.kind()), exit_code_for(e.kind()),
                        e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error(err, "io", "usage", kExitUsage, e.what());
  } catch (const std::exception& e) {
    return report_error(err, "internal", "internal", kExitNumerical, e.what());
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace xling::cli

#include "xling/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "xling/error.hpp"

namespace xling::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

void AlignedCorpus::push_back(Document source, Document target) {
  source_docs.push_back(std::move(source));
  target_docs.push_back(std::move(target));
}

namespace {

void validate_side(const std::vector<Document>& docs, const char* side) {
  std::set<std::string_view> seen;
  for (const auto& doc : docs) {
    if (doc.id.empty()) {
      throw Error(ErrorCode::kMalformedRecord, std::string(side) + " document with empty id");
    }
    if (!seen.insert(doc.id).second) {
      throw Error(ErrorCode::kMalformedRecord,
                  std::string(side) + " document id repeated: " + doc.id);
    }
    if (doc.text.empty() && !doc.degenerate) {
      throw Error(ErrorCode::kMalformedRecord,
                  "empty text not flagged degenerate: " + doc.id);
    }
    if (doc.language != docs.front().language) {
      throw Error(ErrorCode::kMalformedRecord, std::string("mixed languages on ") + side +
                                                   " side: " + docs.front().language + " vs " +
                                                   doc.language);
    }
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Document make_document(std::string id, std::string language, std::string text) {
  Document doc;
  doc.id = std::move(id);
  doc.language = std::move(language);
  doc.text = std::move(text);
  doc.degenerate = doc.text.empty();
  return doc;
}

std::map<std::string, fs::path> list_txt(const fs::path& dir) {
  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.emplace(entry.path().stem().string(), entry.path());
    }
  }
  return files;
}

AlignedCorpus load_pairdirs(const fs::path& root, const LoadOptions& options) {
  const fs::path src_dir = root / options.source_language;
  const fs::path tgt_dir = root / options.target_language;
  for (const auto& dir : {src_dir, tgt_dir}) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "missing directory " + dir.string());
  }
  const auto sources = list_txt(src_dir);
  const auto targets = list_txt(tgt_dir);
  for (const auto& [id, path] : targets) {
    if (!sources.contains(id)) {
      throw Error(ErrorCode::kMissingCounterpart, "target " + path.string() + " has no source");
    }
  }

  AlignedCorpus corpus;
  for (const auto& [id, path] : sources) {
    auto it = targets.find(id);
    if (it == targets.end()) {
      throw Error(ErrorCode::kMissingCounterpart, "source " + path.string() + " has no target");
    }
    corpus.push_back(make_document(id, options.source_language, read_file(path)),
                     make_document(id, options.target_language, read_file(it->second)));
  }
  return corpus;
}

std::string required_string(const json& record, const char* field, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw RecordError(ErrorCode::kMalformedRecord, line,
                      std::string("missing string field '") + field + "'");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& record, const char* field,
                                           std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw RecordError(ErrorCode::kMalformedRecord, line,
                      std::string("field '") + field + "' must be a string");
  }
  return it->get<std::string>();
}

json parse_line(const std::string& line, std::size_t line_no) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw RecordError(ErrorCode::kMalformedRecord, line_no, e.what());
  }
  if (!record.is_object()) {
    throw RecordError(ErrorCode::kMalformedRecord, line_no, "record is not an object");
  }
  return record;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

void AlignedCorpus::validate() const {
  if (source_docs.size() != target_docs.size()) {
    throw Error(ErrorCode::kMalformedRecord, "corpus sides differ in length");
  }
  if (empty()) return;
  validate_side(source_docs, "source");
  validate_side(target_docs, "target");
}

CorpusFormat parse_corpus_format(const std::string& name) {
  if (name == "pairdirs") return CorpusFormat::kPairDirs;
  if (name == "jsonl") return CorpusFormat::kJsonl;
  throw Error(ErrorCode::kInvalidArgument, "unknown corpus format: " + name);
}

AlignedCorpus read_corpus_jsonl(std::istream& in, const LoadOptions& options) {
  AlignedCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json record = parse_line(line, line_no);

    Document src = make_document(required_string(record, "src_id", line_no),
                                 optional_string(record, "src_lang", line_no)
                                     .value_or(options.source_language),
                                 required_string(record, "src_text", line_no));
    Document tgt = make_document(required_string(record, "tgt_id", line_no),
                                 optional_string(record, "tgt_lang", line_no)
                                     .value_or(options.target_language),
                                 required_string(record, "tgt_text", line_no));
    src.group_key = tgt.group_key = optional_string(record, "group_key", line_no);
    src.category = tgt.category = optional_string(record, "category", line_no);
    corpus.push_back(std::move(src), std::move(tgt));
  }
  corpus.validate();
  return corpus;
}

AlignedCorpus load_aligned_corpus(const fs::path& path, CorpusFormat format,
                                  const LoadOptions& options) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "no such path: " + path.string());
  AlignedCorpus corpus;
  if (format == CorpusFormat::kPairDirs) {
    corpus = load_pairdirs(path, options);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
    corpus = read_corpus_jsonl(in, options);
  }
  corpus.validate();
  return corpus;
}

void write_corpus_jsonl(const AlignedCorpus& corpus, std::ostream& out) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Document& src = corpus.source_docs[i];
    const Document& tgt = corpus.target_docs[i];
    json record = {{"src_id", src.id},     {"tgt_id", tgt.id},
                   {"src_lang", src.language}, {"tgt_lang", tgt.language},
                   {"src_text", src.text}, {"tgt_text", tgt.text}};
    if (src.group_key) record["group_key"] = *src.group_key;
    if (src.category) record["category"] = *src.category;
    out << record.dump() << '\n';
  }
}

void write_corpus_jsonl(const AlignedCorpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_corpus_jsonl(corpus, out);
}

std::vector<Document> read_documents_jsonl(std::istream& in, const std::string& default_language) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json record = parse_line(line, line_no);
    Document doc = make_document(
        required_string(record, "id", line_no),
        optional_string(record, "lang", line_no).value_or(default_language),
        required_string(record, "text", line_no));
    doc.group_key = optional_string(record, "group_key", line_no);
    doc.category = optional_string(record, "category", line_no);
    docs.push_back(std::move(doc));
  }
  std::set<std::string_view> seen;
  for (const auto& doc : docs) {
    if (!seen.insert(doc.id).second) {
      throw Error(ErrorCode::kMalformedRecord, "document id repeated: " + doc.id);
    }
  }
  return docs;
}

std::vector<Document> load_documents_jsonl(const fs::path& path,
                                           const std::string& default_language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_documents_jsonl(in, default_language);
}

void write_documents_jsonl(const std::vector<Document>& docs, std::ostream& out) {
  for (const auto& doc : docs) {
    json record = {{"id", doc.id}, {"lang", doc.language}, {"text", doc.text}};
    if (doc.group_key) record["group_key"] = *doc.group_key;
    if (doc.category) record["category"] = *doc.category;
    out << record.dump() << '\n';
  }
}

CorpusSplit split_corpus(const AlignedCorpus& corpus, double train_fraction,
                         std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train fraction must lie in (0, 1)");
  }
  const std::size_t d = corpus.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(d)));
  if (d < 2 || n_train == 0 || n_train >= d) {
    throw Error(ErrorCode::kDegenerateCorpus,
                "split of " + std::to_string(d) + " couples leaves an empty part");
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates by hand: std::shuffle's draw sequence is library-specific.
  for (std::size_t i = d - 1; i > 0; --i) {
    std::swap(order[i], order[rng() % (i + 1)]);
  }
  std::vector<bool> in_train(d, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  CorpusSplit split;
  for (std::size_t i = 0; i < d; ++i) {
    auto& part = in_train[i] ? split.train : split.test;
    part.push_back(corpus.source_docs[i], corpus.target_docs[i]);
  }
  return split;
}

}  // namespace xling::corpus

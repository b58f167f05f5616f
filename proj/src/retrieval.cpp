#include "xling/retrieval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

#include <json.hpp>

#include "binary_io.hpp"
#include "xling/error.hpp"
#include "xling/vsm.hpp"

namespace xling::retrieval {

namespace {

constexpr char kStoreMagic[8] = {'X', 'L', 'V', 'S', 'T', 'O', 'R', '1'};

bool ranks_before(const RankedEntry& a, const RankedEntry& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.id < b.id;
}

bool pair_before(const AlignmentPair& a, const AlignmentPair& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  if (a.source_id != b.source_id) return a.source_id < b.source_id;
  return a.target_id < b.target_id;
}

double row_cosine(const Eigen::VectorXd& query, const EmbeddingSet& set, std::size_t row) {
  return vsm::cosine(query, set.vectors.row(static_cast<Eigen::Index>(row)).transpose());
}

EmbeddingSet subset(const EmbeddingSet& set, const std::vector<std::size_t>& rows) {
  EmbeddingSet out;
  out.vectors.resize(static_cast<Eigen::Index>(rows.size()), set.vectors.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.ids.push_back(set.ids[rows[i]]);
    out.vectors.row(static_cast<Eigen::Index>(i)) =
        set.vectors.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::map<std::string, std::vector<std::size_t>> partition(const std::vector<std::string>& groups,
                                                          std::size_t size, bool grouped) {
  std::map<std::string, std::vector<std::size_t>> parts;
  for (std::size_t i = 0; i < size; ++i) parts[grouped ? groups.at(i) : std::string()].push_back(i);
  return parts;
}

std::vector<AlignmentPair> align_group(const EmbeddingSet& sources, const EmbeddingSet& targets,
                                       const std::string& group, const AlignOptions& options) {
  std::vector<AlignmentPair> pairs;
  pairs.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const Eigen::VectorXd query = sources.vectors.row(static_cast<Eigen::Index>(i)).transpose();
    const RankedList best = retrieve(query, targets, 1);
    pairs.push_back({sources.ids[i], best.entries.front().id, best.entries.front().similarity, group});
  }
  if (options.mutual_best) {
    std::map<std::string, std::string> best_source;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const Eigen::VectorXd query = targets.vectors.row(static_cast<Eigen::Index>(j)).transpose();
      best_source[targets.ids[j]] = retrieve(query, sources, 1).entries.front().id;
    }
    std::erase_if(pairs, [&](const AlignmentPair& p) {
      return best_source.at(p.target_id) != p.source_id;
    });
  }
  std::sort(pairs.begin(), pairs.end(), pair_before);
  if (pairs.size() > options.top_n) pairs.resize(options.top_n);
  return pairs;
}

std::vector<std::string> groups_of(const std::vector<TokenDoc>& docs, bool grouped,
                                   const char* side) {
  std::vector<std::string> groups;
  groups.reserve(docs.size());
  for (const auto& doc : docs) {
    if (grouped && !doc.group) {
      throw Error(ErrorCode::kPrecondition,
                  std::string(side) + " document '" + doc.id + "' has no group key");
    }
    groups.push_back(doc.group.value_or(std::string()));
  }
  return groups;
}

std::string format_fixed(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace

EmbeddingSet embed_documents(const std::vector<TokenDoc>& docs, const lsi::LsiModel& model,
                             bidict::Side side) {
  EmbeddingSet set;
  set.vectors.resize(static_cast<Eigen::Index>(docs.size()), model.k());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    set.ids.push_back(docs[i].id);
    const Eigen::VectorXd e = model.kind == lsi::ModelKind::kCrosslingual
                                  ? lsi::embed_crosslingual(docs[i].tokens, side, model)
                                  : lsi::embed(docs[i].tokens, model);
    set.vectors.row(static_cast<Eigen::Index>(i)) = e.transpose();
  }
  return set;
}

void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kStoreMagic, sizeof(kStoreMagic));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dimension()));
  detail::write_le<std::uint64_t>(out, set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    detail::write_string(out, set.ids[i]);
    for (Eigen::Index c = 0; c < set.vectors.cols(); ++c) {
      detail::write_le<double>(out, set.vectors(static_cast<Eigen::Index>(i), c));
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  detail::LeReader reader(in, ErrorCode::kCorruptModel);
  char magic[sizeof(kStoreMagic)];
  reader.read_bytes(magic, sizeof(magic), "vector store magic");
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kStoreMagic))) {
    throw Error(ErrorCode::kCorruptModel, path.string() + " is not a vector store");
  }
  const auto dim = reader.read<std::uint32_t>("dimension");
  const auto count = reader.read<std::uint64_t>("count");
  if (dim > (1u << 20) || count > (1ull << 32)) reader.fail("vector store header");
  EmbeddingSet set;
  std::vector<double> values;
  for (std::uint64_t i = 0; i < count; ++i) {
    set.ids.push_back(reader.read_string("document id", 1u << 16));
    for (std::uint32_t c = 0; c < dim; ++c) values.push_back(reader.read<double>("vector"));
  }
  if (!reader.at_end()) throw Error(ErrorCode::kCorruptModel, "trailing bytes in vector store");
  set.vectors = Eigen::Map<RowMatrix>(values.data(), static_cast<Eigen::Index>(count),
                                      static_cast<Eigen::Index>(dim));
  return set;
}

RankedList retrieve(const Eigen::VectorXd& query, const EmbeddingSet& candidates, std::size_t n,
                    std::string query_id) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  if (candidates.size() == 0) throw Error(ErrorCode::kEmptyCandidates, "no candidates to rank");
  if (query.size() != candidates.vectors.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query dimension " + std::to_string(query.size()) + " differs from candidate dimension " +
                    std::to_string(candidates.vectors.cols()));
  }
  RankedList list;
  list.query_id = std::move(query_id);
  list.entries.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    list.entries.push_back({candidates.ids[i], row_cosine(query, candidates, i)});
  }
  const auto keep = std::min(n, list.entries.size());
  std::partial_sort(list.entries.begin(), list.entries.begin() + static_cast<std::ptrdiff_t>(keep),
                    list.entries.end(), ranks_before);
  list.entries.resize(keep);
  return list;
}

TokenDoc IdentityProvider::translate(const TokenDoc& doc, const std::string&) const { return doc; }

TokenDoc DictionaryProvider::translate(const TokenDoc& doc, const std::string&) const {
  TokenDoc out{doc.id, {}, doc.group};
  out.tokens.reserve(doc.tokens.size());
  for (const auto& token : doc.tokens) {
    const auto translations = dict_->translations(token, bidict::Side::kSource);
    if (translations.empty()) {
      out.tokens.push_back(token);
    } else {
      out.tokens.insert(out.tokens.end(), translations.begin(), translations.end());
    }
  }
  return out;
}

TokenDoc CachedProvider::translate(const TokenDoc& doc, const std::string& target_language) const {
  auto it = cache_.find(doc.id);
  if (it == cache_.end()) {
    throw Error(ErrorCode::kProvider,
                "no cached " + target_language + " translation for document '" + doc.id + "'");
  }
  return {doc.id, it->second, doc.group};
}

std::vector<RankedList> retrieve_ar_lsi(const std::vector<TokenDoc>& queries,
                                        const std::vector<TokenDoc>& candidates,
                                        const lsi::LsiModel& model,
                                        const TranslationProvider& provider, std::size_t n) {
  if (model.kind != lsi::ModelKind::kMonolingual) {
    throw Error(ErrorCode::kPrecondition, "AR-LSI retrieval requires a monolingual model");
  }
  if (queries.empty()) return {};
  return retrieve_ar_lsi(queries, embed_documents(candidates, model, bidict::Side::kSource), model,
                         provider, n);
}

std::vector<RankedList> retrieve_ar_lsi(const std::vector<TokenDoc>& queries,
                                        const EmbeddingSet& candidates, const lsi::LsiModel& model,
                                        const TranslationProvider& provider, std::size_t n) {
  if (model.kind != lsi::ModelKind::kMonolingual) {
    throw Error(ErrorCode::kPrecondition, "AR-LSI retrieval requires a monolingual model");
  }
  std::vector<RankedList> lists;
  for (const auto& query : queries) {
    TokenDoc translated;
    try {
      translated = provider.translate(query, model.source_language);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kProvider) throw;
      RankedList skipped;
      skipped.query_id = query.id;
      skipped.skipped = true;
      skipped.skip_reason = e.what();
      lists.push_back(std::move(skipped));
      continue;
    }
    lists.push_back(retrieve(lsi::embed(translated.tokens, model), candidates, n, query.id));
  }
  return lists;
}

std::vector<RankedList> retrieve_cl_lsi(const std::vector<TokenDoc>& queries,
                                        const std::vector<TokenDoc>& candidates,
                                        const lsi::LsiModel& model, std::size_t n) {
  if (model.kind != lsi::ModelKind::kCrosslingual) {
    throw Error(ErrorCode::kPrecondition, "CL-LSI retrieval requires a cross-lingual model");
  }
  if (queries.empty()) return {};
  return retrieve_cl_lsi(queries, embed_documents(candidates, model, bidict::Side::kTarget), model, n);
}

std::vector<RankedList> retrieve_cl_lsi(const std::vector<TokenDoc>& queries,
                                        const EmbeddingSet& candidates, const lsi::LsiModel& model,
                                        std::size_t n) {
  if (model.kind != lsi::ModelKind::kCrosslingual) {
    throw Error(ErrorCode::kPrecondition, "CL-LSI retrieval requires a cross-lingual model");
  }
  std::vector<RankedList> lists;
  for (const auto& query : queries) {
    lists.push_back(retrieve(lsi::embed_crosslingual(query.tokens, bidict::Side::kSource, model),
                             candidates, n, query.id));
  }
  return lists;
}

std::vector<AlignmentPair> align_embeddings(const EmbeddingSet& sources,
                                            const std::vector<std::string>& source_groups,
                                            const EmbeddingSet& targets,
                                            const std::vector<std::string>& target_groups,
                                            const AlignOptions& options,
                                            std::vector<std::string>* warnings) {
  if (options.top_n == 0) throw Error(ErrorCode::kInvalidArgument, "top_n must be at least 1");
  const auto source_parts = partition(source_groups, sources.size(), options.grouped);
  const auto target_parts = partition(target_groups, targets.size(), options.grouped);
  std::set<std::string> keys;
  for (const auto& [key, rows] : source_parts) keys.insert(key);
  for (const auto& [key, rows] : target_parts) keys.insert(key);

  std::vector<AlignmentPair> pairs;
  for (const auto& key : keys) {
    auto s = source_parts.find(key);
    auto t = target_parts.find(key);
    if (s == source_parts.end() || t == target_parts.end()) {
      if (warnings != nullptr) {
        warnings->push_back("group '" + key + "' has no " +
                            (s == source_parts.end() ? "source" : "target") +
                            " documents; skipped");
      }
      continue;
    }
    auto group_pairs =
        align_group(subset(sources, s->second), subset(targets, t->second), key, options);
    pairs.insert(pairs.end(), group_pairs.begin(), group_pairs.end());
  }
  return pairs;
}

std::vector<AlignmentPair> align_corpora(const std::vector<TokenDoc>& sources,
                                         const std::vector<TokenDoc>& targets,
                                         const lsi::LsiModel& model, const AlignOptions& options,
                                         std::vector<std::string>* warnings) {
  if (model.kind != lsi::ModelKind::kCrosslingual) {
    throw Error(ErrorCode::kPrecondition, "alignment requires a cross-lingual model");
  }
  const auto source_groups = groups_of(sources, options.grouped, "source");
  const auto target_groups = groups_of(targets, options.grouped, "target");
  return align_embeddings(embed_documents(sources, model, bidict::Side::kSource), source_groups,
                          embed_documents(targets, model, bidict::Side::kTarget), target_groups,
                          options, warnings);
}

double recall_at_k(const std::vector<RankedList>& lists, const GoldMapping& gold, std::size_t k) {
  if (lists.empty()) throw Error(ErrorCode::kPrecondition, "recall over zero queries");
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  std::size_t hits = 0;
  for (const auto& list : lists) {
    auto it = gold.find(list.query_id);
    if (it == gold.end()) {
      throw Error(ErrorCode::kMissingGold, "no gold target for query '" + list.query_id + "'");
    }
    if (list.skipped) continue;
    const auto depth = std::min(k, list.entries.size());
    for (std::size_t r = 0; r < depth; ++r) {
      if (list.entries[r].id == it->second) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(lists.size());
}

std::size_t histogram_bin(double similarity) noexcept {
  std::size_t bin = 0;
  while (bin < kHistogramEdges.size() && similarity >= kHistogramEdges[bin]) ++bin;
  return bin;
}

std::string histogram_label(std::size_t bin) {
  if (bin >= kHistogramBins) throw Error(ErrorCode::kInvalidArgument, "histogram bin out of range");
  char buf[32];
  if (bin == 0) {
    std::snprintf(buf, sizeof(buf), "<%.1f", kHistogramEdges.front());
  } else if (bin == kHistogramEdges.size()) {
    std::snprintf(buf, sizeof(buf), ">=%.1f", kHistogramEdges.back());
  } else {
    std::snprintf(buf, sizeof(buf), "[%.1f,%.1f)", kHistogramEdges[bin - 1], kHistogramEdges[bin]);
  }
  return buf;
}

EvalReport retrieval_report(const std::vector<RankedList>& lists, const GoldMapping& gold,
                            const std::vector<std::size_t>& ks) {
  EvalReport report;
  for (const auto k : ks) report.recall[k] = recall_at_k(lists, gold, k);
  for (const auto& list : lists) {
    QueryHit hit{list.query_id, 0};
    const auto& expected = gold.at(list.query_id);
    if (!list.skipped) {
      for (std::size_t r = 0; r < list.entries.size(); ++r) {
        if (list.entries[r].id == expected) {
          hit.rank = r + 1;
          break;
        }
      }
    }
    report.hits.push_back(std::move(hit));
  }
  return report;
}

EvalReport alignment_report(const std::vector<AlignmentPair>& pairs, const GoldMapping* gold) {
  if (pairs.empty()) throw Error(ErrorCode::kPrecondition, "no aligned pairs to report on");
  EvalReport report;
  report.pair_count = pairs.size();
  std::map<std::string, GroupRange> ranges;
  for (const auto& p : pairs) {
    auto [it, fresh] = ranges.try_emplace(p.group, GroupRange{p.group, 0, p.similarity, p.similarity});
    GroupRange& range = it->second;
    ++range.count;
    range.min = std::min(range.min, p.similarity);
    range.max = std::max(range.max, p.similarity);
    ++report.histogram[histogram_bin(p.similarity)];
  }
  for (auto& [key, range] : ranges) report.groups.push_back(range);
  if (gold != nullptr) {
    std::size_t correct = 0;
    for (const auto& p : pairs) {
      auto it = gold->find(p.source_id);
      if (it != gold->end() && it->second == p.target_id) ++correct;
    }
    report.correct = correct;
    report.accuracy = static_cast<double>(correct) / static_cast<double>(pairs.size());
  }
  return report;
}

double oracle_experiment(const std::vector<TokenDoc>& docs, const lsi::LsiModel& model,
                         bidict::Side side) {
  if (docs.empty()) throw Error(ErrorCode::kPrecondition, "oracle experiment on an empty corpus");
  const EmbeddingSet set = embed_documents(docs, model, side);
  std::vector<std::string> zero;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.vectors.row(static_cast<Eigen::Index>(i)).norm() == 0.0) zero.push_back(set.ids[i]);
  }
  if (!zero.empty()) {
    std::string msg = "documents with a zero LSI vector:";
    for (const auto& id : zero) msg += " " + id;
    throw Error(ErrorCode::kPrecondition, msg);
  }
  std::vector<std::string> offenders;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Eigen::VectorXd query = set.vectors.row(static_cast<Eigen::Index>(i)).transpose();
    const RankedList top = retrieve(query, set, 1, set.ids[i]);
    if (top.entries.front().id != set.ids[i]) {
      offenders.push_back(set.ids[i] + "->" + top.entries.front().id);
    }
  }
  if (!offenders.empty()) {
    std::string msg = "oracle self-test failed for " + std::to_string(offenders.size()) + " of " +
                      std::to_string(set.size()) + " documents:";
    for (const auto& o : offenders) msg += " " + o;
    throw Error(ErrorCode::kSelfTestFailure, msg);
  }
  return 1.0;
}

void write_report_json(const EvalReport& report, std::ostream& out) {
  nlohmann::ordered_json j;
  if (!report.recall.empty()) {
    nlohmann::ordered_json recall = nlohmann::ordered_json::object();
    for (const auto& [k, r] : report.recall) recall["R@" + std::to_string(k)] = r;
    j["recall"] = recall;
    nlohmann::ordered_json hits = nlohmann::ordered_json::array();
    for (const auto& h : report.hits) hits.push_back({{"query", h.query_id}, {"rank", h.rank}});
    j["queries"] = hits;
  }
  if (report.pair_count > 0) {
    j["pairs"] = report.pair_count;
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const auto& g : report.groups) {
      groups.push_back({{"group", g.group}, {"count", g.count}, {"min", g.min}, {"max", g.max}});
    }
    j["groups"] = groups;
    nlohmann::ordered_json hist = nlohmann::ordered_json::array();
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
      hist.push_back({{"bin", histogram_label(b)}, {"count", report.histogram[b]}});
    }
    j["histogram"] = hist;
  }
  if (report.accuracy) {
    j["correct"] = *report.correct;
    j["accuracy"] = *report.accuracy;
  }
  out << j.dump(2) << '\n';
}

void write_ranges_csv(const EvalReport& report, std::ostream& out) {
  out << "group,count,min,max\n";
  for (const auto& g : report.groups) {
    out << g.group << ',' << g.count << ',' << format_fixed(g.min) << ',' << format_fixed(g.max)
        << '\n';
  }
}

void write_histogram_csv(const EvalReport& report, std::ostream& out) {
  out << "bin,count\n";
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    out << '"' << histogram_label(b) << "\"," << report.histogram[b] << '\n';
  }
}

void write_alignment_tsv(const std::vector<AlignmentPair>& pairs, std::ostream& out) {
  for (const auto& p : pairs) {
    out << p.source_id << '\t' << p.target_id << '\t' << format_fixed(p.similarity) << '\t'
        << p.group << '\n';
  }
}

void write_ranked_lists_jsonl(const std::vector<RankedList>& lists, std::ostream& out) {
  for (const auto& list : lists) {
    nlohmann::ordered_json j;
    j["query"] = list.query_id;
    if (list.skipped) {
      j["skipped"] = true;
      j["reason"] = list.skip_reason;
    }
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (const auto& e : list.entries) results.push_back({{"id", e.id}, {"sim", e.similarity}});
    j["results"] = results;
    out << j.dump() << '\n';
  }
}

}  // namespace xling::retrieval

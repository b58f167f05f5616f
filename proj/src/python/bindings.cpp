#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "xling/bidict.hpp"
#include "xling/cli.hpp"
#include "xling/error.hpp"
#include "xling/lsi.hpp"
#include "xling/retrieval.hpp"
#include "xling/textprep.hpp"
#include "xling/vsm.hpp"
#include "xling/wiki.hpp"

namespace py = pybind11;
using namespace xling;

namespace {

using PyDoc = std::tuple<std::string, std::vector<std::string>, std::optional<std::string>>;

std::vector<retrieval::TokenDoc> to_docs(const std::vector<PyDoc>& docs) {
  std::vector<retrieval::TokenDoc> out;
  out.reserve(docs.size());
  for (const auto& [id, tokens, group] : docs) out.push_back({id, tokens, group});
  return out;
}

py::list to_python(const std::vector<retrieval::RankedList>& lists) {
  py::list out;
  for (const auto& list : lists) {
    py::list entries;
    for (const auto& e : list.entries) entries.append(py::make_tuple(e.id, e.similarity));
    out.append(py::make_tuple(list.query_id, entries));
  }
  return out;
}

bidict::Side parse_side(const std::string& side) {
  if (side == "source") return bidict::Side::kSource;
  if (side == "target") return bidict::Side::kTarget;
  throw Error(ErrorCode::kInvalidArgument, "side must be 'source' or 'target'");
}

std::string kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kData: return "data";
    case ErrorKind::kNumerical: return "numerical";
  }
  return "unknown";
}

}  // namespace

PYBIND11_MODULE(_xling, m) {
  m.doc() = "Cross-lingual document similarity and alignment";

  static py::exception<Error> error(m, "XlingError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object value = py::handle(error.ptr())(e.what());
      value.attr("code") = std::string(error_code_name(e.code()));
      value.attr("kind") = kind_name(e.kind());
      py::set_error(error, value);
    }
  });

  m.def("tokenize",
        [](const std::string& text, bool lowercase) {
          std::vector<std::string> out;
          for (auto& t : textprep::tokenize(text, lowercase)) out.push_back(std::move(t.reduced));
          return out;
        },
        py::arg("text"), py::arg("lowercase") = true);

  m.def("strip_wiki_markup", &corpus::strip_wiki_markup, py::arg("wikitext"));
  m.def("interlanguage_links",
        [](const std::string& wikitext) {
          std::vector<std::pair<std::string, std::string>> out;
          for (auto& l : corpus::parse_interlanguage_links(wikitext)) {
            out.emplace_back(std::move(l.language), std::move(l.title));
          }
          return out;
        },
        py::arg("wikitext"));

  py::class_<bidict::BilingualDictionary>(m, "Dictionary")
      .def(py::init<>())
      .def_static("load", &bidict::BilingualDictionary::load, py::arg("path"))
      .def_static("parse",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return bidict::BilingualDictionary::read(in);
                  },
                  py::arg("text"))
      .def("add_synset", &bidict::BilingualDictionary::add_synset, py::arg("source"),
           py::arg("target"))
      .def("translations",
           [](const bidict::BilingualDictionary& d, const std::string& term, const std::string& side) {
             return d.translations(term, parse_side(side));
           },
           py::arg("term"), py::arg("side") = "source")
      .def("__len__", [](const bidict::BilingualDictionary& d) { return d.synsets().size(); });

  m.def("bin_measure",
        [](const std::vector<std::string>& from, const std::vector<std::string>& to,
           const bidict::BilingualDictionary& dict, const std::string& side) {
          return bidict::bin_measure(from, to, dict, parse_side(side));
        },
        py::arg("from_doc"), py::arg("to_doc"), py::arg("dictionary"), py::arg("side") = "source");
  m.def("bin_symmetric",
        [](const std::vector<std::string>& s, const std::vector<std::string>& t,
           const bidict::BilingualDictionary& dict) { return bidict::bin_symmetric(s, t, dict); },
        py::arg("source"), py::arg("target"), py::arg("dictionary"));
  m.def("oov_rate",
        [](const std::vector<std::string>& s, const std::vector<std::string>& t,
           const bidict::BilingualDictionary& dict) { return bidict::oov_rate(s, t, dict); },
        py::arg("source"), py::arg("target"), py::arg("dictionary"));
  m.def("matching_rate",
        [](const std::vector<std::string>& s, const std::vector<std::string>& t,
           const bidict::BilingualDictionary& dict) { return bidict::matching_rate(s, t, dict); },
        py::arg("source"), py::arg("target"), py::arg("dictionary"));
  m.def("dict_cosine",
        [](const std::vector<std::string>& s, const std::vector<std::string>& t,
           const bidict::BilingualDictionary& dict, const std::vector<vsm::TokenList>& source_docs,
           const std::vector<vsm::TokenList>& target_docs) {
          return bidict::dict_cosine(s, t, dict, vsm::Vocabulary::build(source_docs),
                                     vsm::Vocabulary::build(target_docs));
        },
        py::arg("source"), py::arg("target"), py::arg("dictionary"), py::arg("source_docs"),
        py::arg("target_docs"),
        "Document frequencies are counted over source_docs and target_docs.");

  m.def("truncated_svd",
        [](const Eigen::MatrixXd& dense, int k, std::uint64_t seed) {
          lsi::SvdOptions options;
          options.seed = seed;
          const vsm::SparseMatrix sparse = dense.sparseView();
          auto r = lsi::truncated_svd(sparse, k, options);
          return py::make_tuple(r.u, r.s, r.v);
        },
        py::arg("matrix"), py::arg("k"), py::arg("seed") = 42, "Returns (U, s, V).");

  py::class_<lsi::LsiModel>(m, "LsiModel")
      .def_property_readonly("kind",
                             [](const lsi::LsiModel& model) { return std::string(lsi::model_kind_name(model.kind)); })
      .def_property_readonly("k", &lsi::LsiModel::k)
      .def_property_readonly("documents", &lsi::LsiModel::documents)
      .def_property_readonly("dimension", &lsi::LsiModel::dimension)
      .def_readonly("u", &lsi::LsiModel::u)
      .def_readonly("s", &lsi::LsiModel::s)
      .def_readonly("v", &lsi::LsiModel::v)
      .def("save", [](const lsi::LsiModel& model, const std::filesystem::path& path) { lsi::save_model(model, path); },
           py::arg("path"))
      .def_static("load", [](const std::filesystem::path& path) { return lsi::load_model(path); },
                  py::arg("path"))
      .def("embed",
           [](const lsi::LsiModel& model, const std::vector<std::string>& tokens, const std::string& side) {
             if (model.kind == lsi::ModelKind::kMonolingual) return lsi::embed(tokens, model);
             return lsi::embed_crosslingual(tokens, parse_side(side), model);
           },
           py::arg("tokens"), py::arg("side") = "source");

  m.def("train_monolingual",
        [](const std::vector<vsm::TokenList>& docs, int k, const std::string& language, std::uint64_t seed) {
          lsi::SvdOptions options;
          options.seed = seed;
          return lsi::train_monolingual(docs, k, language, options).model;
        },
        py::arg("documents"), py::arg("k"), py::arg("language") = "ar", py::arg("seed") = 42);
  m.def("train_crosslingual",
        [](const std::vector<vsm::TokenList>& source, const std::vector<vsm::TokenList>& target, int k,
           const std::string& source_language, const std::string& target_language, std::uint64_t seed) {
          lsi::SvdOptions options;
          options.seed = seed;
          return lsi::train_crosslingual(source, target, k, source_language, target_language, options)
              .model;
        },
        py::arg("source"), py::arg("target"), py::arg("k"), py::arg("source_language") = "en",
        py::arg("target_language") = "ar", py::arg("seed") = 42);

  m.def("retrieve",
        [](const std::vector<PyDoc>& queries, const std::vector<PyDoc>& candidates,
           const lsi::LsiModel& model, std::size_t n) {
          return to_python(retrieval::retrieve_cl_lsi(to_docs(queries), to_docs(candidates), model, n));
        },
        py::arg("queries"), py::arg("candidates"), py::arg("model"), py::arg("n") = 5,
        "Cross-lingual retrieval. Documents are (id, tokens, group) tuples; "
        "returns [(query_id, [(id, similarity), ...]), ...].");
  m.def("recall_at_k",
        [](const std::vector<PyDoc>& queries, const std::vector<PyDoc>& candidates,
           const lsi::LsiModel& model, const retrieval::GoldMapping& gold, std::size_t k) {
          const auto lists = retrieval::retrieve_cl_lsi(to_docs(queries), to_docs(candidates), model, k);
          return retrieval::recall_at_k(lists, gold, k);
        },
        py::arg("queries"), py::arg("candidates"), py::arg("model"), py::arg("gold"), py::arg("k"));
  m.def("align",
        [](const std::vector<PyDoc>& sources, const std::vector<PyDoc>& targets,
           const lsi::LsiModel& model, std::size_t top_n, bool grouped, bool mutual_best) {
          retrieval::AlignOptions options;
          options.top_n = top_n;
          options.grouped = grouped;
          options.mutual_best = mutual_best;
          std::vector<std::tuple<std::string, std::string, double, std::string>> out;
          for (auto& p : retrieval::align_corpora(to_docs(sources), to_docs(targets), model, options)) {
            out.emplace_back(std::move(p.source_id), std::move(p.target_id), p.similarity,
                             std::move(p.group));
          }
          return out;
        },
        py::arg("sources"), py::arg("targets"), py::arg("model"), py::arg("top_n") = 15,
        py::arg("grouped") = false, py::arg("mutual_best") = false,
        "Returns [(source_id, target_id, similarity, group), ...].");
  m.def("oracle_experiment",
        [](const std::vector<PyDoc>& docs, const lsi::LsiModel& model, const std::string& side) {
          return retrieval::oracle_experiment(to_docs(docs), model, parse_side(side));
        },
        py::arg("documents"), py::arg("model"), py::arg("side") = "source");

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out;
          std::ostringstream err;
          const int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a subcommand in-process; returns (exit_code, stdout, stderr).");
}

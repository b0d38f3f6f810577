// Python bindings for the co-occurrence toolkit.

#include <map>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cooc/bench.hpp"
#include "cooc/corpus.hpp"
#include "cooc/counters.hpp"
#include "cooc/error.hpp"
#include "cooc/index.hpp"
#include "cooc/oracle.hpp"
#include "cooc/pairstore.hpp"
#include "cooc/stats.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace cooc;

namespace {

py::dict stats_dict(const CollectionStats& s) {
  py::dict d;
  d["doc_count"] = s.doc_count;
  d["avg_len"] = s.avg_len;
  d["avg_defined"] = s.avg_defined;
  d["min_len"] = s.min_len;
  d["max_len"] = s.max_len;
  d["stddev_len"] = s.stddev_len;
  d["postings"] = s.postings;
  d["vocab"] = s.vocab;
  d["distinct_pairs"] = s.distinct_pairs;
  d["output_bytes"] = s.output_bytes;
  return d;
}

ForwardCollection from_lists(const std::vector<std::vector<TermId>>& docs) {
  ForwardCollection c;
  for (const auto& d : docs) c.append(d);
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact term-pair co-occurrence counting";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<RangeError>(m, "RangeError", error);
  py::register_exception<IoError>(m, "IoError", error);
  py::register_exception<ContractError>(m, "ContractError", error);
  py::register_exception<IngestError>(m, "IngestError", error);
  py::register_exception<SizeError>(m, "SizeError", error);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", error);
  py::register_exception<FormatError>(m, "FormatError", error);

  m.def("tokenize", &tokenize, py::arg("text"));

  py::class_<ForwardCollection>(m, "Collection")
      .def(py::init<>())
      .def(py::init(&from_lists), py::arg("docs"),
           "Build from lists of strictly ascending term ids.")
      .def("__len__", &ForwardCollection::size)
      .def("doc",
           [](const ForwardCollection& c, DocId d) {
             if (d >= c.size()) throw py::index_error("document id out of range");
             const auto s = c.doc(d);
             return std::vector<TermId>(s.begin(), s.end());
           })
      .def_property_readonly("postings", &ForwardCollection::postings)
      .def_property_readonly("term_bound", &ForwardCollection::term_bound)
      .def("prefix", &take_prefix, py::arg("n"))
      .def("__eq__", [](const ForwardCollection& a, const ForwardCollection& b) { return a == b; });

  m.def(
      "ingest",
      [](const std::vector<std::pair<std::string, std::string>>& docs) {
        TermDictionary dict;
        Ingestor ingestor(dict);
        for (const auto& [id, text] : docs) ingestor.add({id, text});
        return std::make_pair(ingestor.release(), dict.terms());
      },
      py::arg("docs"), "Ingest (external_id, text) pairs; returns (collection, terms).");
  m.def(
      "ingest_file",
      [](const fs::path& input, const fs::path& prefix, std::optional<std::size_t> limit) {
        TermDictionary dict;
        Ingestor ingestor(dict);
        read_raw_documents(input, [&](const RawDocument& d) { ingestor.add(d); }, limit);
        const auto c = ingestor.release();
        write_forward(c, forward_path(prefix));
        write_dictionary(dict, dictionary_path(prefix));
        return c.size();
      },
      py::arg("input"), py::arg("prefix"), py::arg("limit") = py::none(),
      "Ingest a directory, text or .jsonl file into <prefix>.fwd/.dict.");

  m.def("read_forward", &read_forward, py::arg("path"), py::arg("limit") = py::none());
  m.def("write_forward", &write_forward, py::arg("collection"), py::arg("path"));
  m.def("read_terms", [](const fs::path& p) { return read_dictionary(p).terms(); },
        py::arg("path"));
  m.def("forward_path", &forward_path);
  m.def("dictionary_path", &dictionary_path);

  m.def("methods", [] {
    std::vector<std::string> names;
    for (Method x : kAllMethods) names.emplace_back(to_string(x));
    return names;
  });

  m.def(
      "count",
      [](const ForwardCollection& c, const std::string& method, const fs::path& out,
         std::uint64_t flush_pairs, std::optional<std::size_t> block_width,
         std::size_t accumulators, std::optional<fs::path> temp_dir,
         std::optional<std::size_t> max_doc_terms, bool allow_quadratic) {
        CounterConfig config;
        config.method = parse_method(method);
        config.output_path = out;
        config.flush_threshold_pairs = flush_pairs;
        config.block_width_k = block_width;
        config.accumulators_a = accumulators;
        if (temp_dir) config.temp_dir = *temp_dir;
        config.max_doc_terms = max_doc_terms;
        config.allow_quadratic = allow_quadratic;
        CounterResult result;
        {
          py::gil_scoped_release release;
          const auto index = build_index(c);
          result = run_counter(config, {&c, &index});
        }
        py::dict d;
        d["method"] = result.report.method;
        d["doc_count"] = result.report.doc_count;
        d["wall_time_s"] = result.report.wall_time_seconds;
        d["peak_mem_bytes"] = result.report.peak_memory_bytes;
        d["pairs_emitted"] = result.stats.pairs_emitted;
        d["groups"] = result.stats.groups;
        d["output_bytes"] = result.stats.output_bytes;
        d["flushes"] = result.stats.flushes;
        d["blocks"] = result.stats.blocks;
        d["block_pairings"] = result.stats.block_pairings;
        d["passes"] = result.stats.passes;
        return d;
      },
      py::arg("collection"), py::arg("method"), py::arg("out"),
      py::arg("flush_pairs") = CounterConfig{}.flush_threshold_pairs,
      py::arg("block_width") = py::none(), py::arg("accumulators") = CounterConfig{}.accumulators_a,
      py::arg("temp_dir") = py::none(), py::arg("max_doc_terms") = py::none(),
      py::arg("allow_quadratic") = false,
      "Count pairs into a run file; returns the run report as a dict.");

  m.def(
      "read_run",
      [](const fs::path& p) {
        std::vector<std::tuple<TermId, TermId, PairCount>> out;
        for (const auto& r : read_run(p)) out.emplace_back(r.primary, r.secondary, r.count);
        return out;
      },
      py::arg("path"), "All (t1, t2, count) records of a run file.");
  m.def(
      "write_run",
      [](const std::vector<std::tuple<TermId, TermId, PairCount>>& recs, const fs::path& p) {
        std::vector<PairRecord> rs;
        rs.reserve(recs.size());
        for (const auto& [a, b, n] : recs) rs.push_back({a, b, n});
        return write_run(rs, p).tuples;
      },
      py::arg("records"), py::arg("path"));
  m.def(
      "merge_runs",
      [](const std::vector<fs::path>& runs, const fs::path& out, std::size_t fan_in) {
        py::gil_scoped_release release;
        return merge_runs(runs, out, fan_in).tuples;
      },
      py::arg("runs"), py::arg("out"), py::arg("fan_in") = kDefaultMergeFanIn);
  m.def(
      "top_pair",
      [](const fs::path& p) -> std::optional<std::tuple<TermId, TermId, PairCount>> {
        const auto r = top_pair(p);
        if (!r) return std::nullopt;
        return std::make_tuple(r->primary, r->secondary, r->count);
      },
      py::arg("path"));

  m.def(
      "brute_force_count",
      [](const ForwardCollection& c) {
        std::map<std::pair<TermId, TermId>, PairCount> out;
        for (const auto& [k, n] : brute_force_count(c)) out.emplace(k, n);
        return out;
      },
      py::arg("collection"), "Reference counts as {(t1, t2): count}.");
  m.def(
      "verify",
      [](const fs::path& run, const ForwardCollection& c) {
        const auto v = compare(run, brute_force_count(c));
        return std::make_pair(v.pass(), format_verdict(v));
      },
      py::arg("run"), py::arg("collection"), "Returns (passed, report text).");

  m.def(
      "compute_stats",
      [](const ForwardCollection& c, std::optional<fs::path> run) {
        return stats_dict(compute_stats(c, run));
      },
      py::arg("collection"), py::arg("run") = py::none());

  m.def(
      "generate_corpus",
      [](const py::dict& spec) {
        const auto text = py::module_::import("json").attr("dumps")(spec).cast<std::string>();
        auto g = generate_corpus(nlohmann::json::parse(text).get<SyntheticCorpusSpec>());
        return std::make_pair(std::move(g.collection), g.dictionary.terms());
      },
      py::arg("spec") = py::dict(),
      "Synthetic collection from a spec dict (missing keys keep defaults);\n"
      "returns (collection, terms).");
}

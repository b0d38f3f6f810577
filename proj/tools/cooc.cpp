// cooc: command-line front end for ingesting collections, building indexes,
// counting term co-occurrences, verifying, and benchmarking.
//
// Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 runtime error.

#include <unistd.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cooc/bench.hpp"
#include "cooc/corpus.hpp"
#include "cooc/counters.hpp"
#include "cooc/error.hpp"
#include "cooc/index.hpp"
#include "cooc/oracle.hpp"
#include "cooc/pairstore.hpp"
#include "cooc/stats.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Globals {
  bool quiet = false;
  fs::path temp_dir;
  std::uint64_t work_limit = 10'000'000'000ull;
};

Globals g;

template <class... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
  if (!g.quiet) std::cerr << fmt::format(f, std::forward<Args>(args)...) << '\n';
}

fs::path temp_dir() {
  return g.temp_dir.empty() ? fs::temp_directory_path() : g.temp_dir;
}

std::optional<std::size_t> parse_block_width(const std::string& s) {
  if (s == "auto") return std::nullopt;
  std::size_t k = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
  if (ec != std::errc() || end != s.data() + s.size() || k == 0) {
    throw cooc::ConfigError(fmt::format("--block-width expects a positive integer or 'auto', got '{}'", s));
  }
  return k;
}

std::vector<std::size_t> parse_sizes(const std::vector<std::string>& items) {
  std::vector<std::size_t> sizes;
  for (const auto& s : items) {
    std::size_t n = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw cooc::ConfigError(fmt::format("bad size '{}'", s));
    }
    sizes.push_back(n);
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] < sizes[i - 1]) throw cooc::ConfigError("--sizes must be ascending");
  }
  return sizes;
}

cooc::ForwardCollection load_collection(const fs::path& prefix, std::optional<std::size_t> limit) {
  auto collection = cooc::read_forward(cooc::forward_path(prefix), limit);
  if (limit && collection.size() < *limit) {
    throw cooc::RangeError(fmt::format("--limit {} exceeds the {} documents in {}", *limit,
                                       collection.size(), prefix.string()));
  }
  return collection;
}

// ---------------------------------------------------------------- ingest
struct IngestArgs {
  fs::path input, out;
  std::optional<std::size_t> limit;
};

int run_ingest(const IngestArgs& a) {
  cooc::TermDictionary dict;
  cooc::Ingestor ingestor(dict);
  cooc::read_raw_documents(a.input, [&](const cooc::RawDocument& d) { ingestor.add(d); },
                           a.limit);
  const auto& collection = ingestor.collection();
  cooc::write_forward(collection, cooc::forward_path(a.out));
  cooc::write_dictionary(dict, cooc::dictionary_path(a.out));
  info("ingested {} documents, {} postings, {} terms", collection.size(), collection.postings(),
       dict.size());
  return 0;
}

// ---------------------------------------------------------------- index
struct IndexArgs {
  fs::path collection, out;
};

int run_index(const IndexArgs& a) {
  const auto collection = load_collection(a.collection, std::nullopt);
  const auto index = cooc::build_index(collection);
  cooc::write_index(index, a.out);
  info("indexed {} terms, {} postings", index.vocab_size(), index.postings_total());
  return 0;
}

// ---------------------------------------------------------------- count
struct CountArgs {
  std::string method;
  fs::path collection, index, out, report;
  std::uint64_t flush_pairs = 100'000'000;
  std::string block_width = "auto";
  std::size_t accumulators = 100;
  std::optional<std::size_t> max_doc_terms;
  std::optional<std::size_t> limit;
  bool allow_quadratic = false;
};

int run_count(const CountArgs& a) {
  cooc::CounterConfig config;
  config.method = cooc::parse_method(a.method);
  config.flush_threshold_pairs = a.flush_pairs;
  config.block_width_k = parse_block_width(a.block_width);
  config.accumulators_a = a.accumulators;
  config.max_doc_terms = a.max_doc_terms;
  config.output_path = a.out;
  config.temp_dir = g.temp_dir;
  config.work_limit = g.work_limit;
  config.allow_quadratic = a.allow_quadratic;
  if (config.flush_threshold_pairs < 1) throw cooc::ConfigError("--flush-pairs must be >= 1");
  if (config.accumulators_a < 1) throw cooc::ConfigError("--accumulators must be >= 1");

  const auto collection = load_collection(a.collection, a.limit);
  std::optional<cooc::InvertedIndex> index;
  const bool needs_index = config.method == cooc::Method::list_pairs ||
                           config.method == cooc::Method::list_blocks ||
                           config.method == cooc::Method::list_scan;
  if (needs_index) {
    if (!a.index.empty() && !a.limit) {
      index = cooc::read_index(a.index);
      if (index->doc_count() > collection.size() ||
          index->vocab_size() < collection.term_bound()) {
        throw cooc::ConsistencyError("--index was not built from --collection");
      }
    } else {
      index = cooc::build_index(collection);
    }
  }
  const auto result = cooc::run_counter(config, {&collection, index ? &*index : nullptr});
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    out << nlohmann::json(result.report).dump(2) << '\n';
    if (!out) throw cooc::IoError(fmt::format("cannot write {}", a.report.string()));
  }
  info("{}: {} pairs from {} documents in {:.3f}s", result.report.method,
       result.report.pairs_emitted, result.report.doc_count, result.report.wall_time_seconds);
  return 0;
}

// ---------------------------------------------------------------- merge
struct MergeArgs {
  std::vector<fs::path> runs;
  fs::path out;
  std::size_t fan_in = cooc::kDefaultMergeFanIn;
};

int run_merge(const MergeArgs& a) {
  if (a.fan_in < 2) throw cooc::ConfigError("--fan-in must be >= 2");
  const auto summary = cooc::merge_runs(a.runs, a.out, a.fan_in);
  info("merged {} runs into {} pairs", a.runs.size(), summary.tuples);
  return 0;
}

// ---------------------------------------------------------------- verify
struct VerifyArgs {
  fs::path collection, run;
  std::optional<std::size_t> limit;
};

int run_verify(const VerifyArgs& a) {
  const auto collection = load_collection(a.collection, a.limit);
  const auto oracle = cooc::brute_force_count(collection);
  cooc::Verdict verdict;
  try {
    verdict = cooc::compare(a.run, oracle);
  } catch (const cooc::FormatError& e) {
    std::cout << "FAIL: unreadable run: " << e.what() << '\n';
    return kExitMismatch;
  }
  std::cout << cooc::format_verdict(verdict);
  return verdict.pass() ? 0 : kExitMismatch;
}

// ---------------------------------------------------------------- stats
struct StatsArgs {
  fs::path collection, run, csv;
  std::vector<std::string> sizes;
  bool pairs = false;
};

int run_stats(const StatsArgs& a) {
  const auto sizes = parse_sizes(a.sizes);
  if (!a.run.empty() && !sizes.empty()) {
    throw cooc::ConfigError("--run applies to the whole collection; use --pairs with --sizes");
  }
  const auto collection = load_collection(a.collection, std::nullopt);
  std::vector<cooc::CollectionStats> rows;
  if (sizes.empty()) {
    rows.push_back(cooc::compute_stats(
        collection, a.run.empty() ? std::nullopt : std::optional<fs::path>(a.run)));
  } else {
    rows = cooc::stats_sweep(collection, sizes, {a.pairs, temp_dir()});
  }
  std::cout << cooc::format_stats_table(rows);
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    cooc::write_stats_csv(rows, out);
    if (!out) throw cooc::IoError(fmt::format("cannot write {}", a.csv.string()));
  }
  return 0;
}

// ---------------------------------------------------------------- gen
struct GenArgs {
  fs::path spec, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> docs;
};

cooc::SyntheticCorpusSpec load_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw cooc::IoError(fmt::format("cannot open {}", path.string()));
  try {
    return nlohmann::json::parse(in).get<cooc::SyntheticCorpusSpec>();
  } catch (const nlohmann::json::exception& e) {
    throw cooc::ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void generate_to(const cooc::SyntheticCorpusSpec& spec, const fs::path& out) {
  const auto corpus = cooc::generate_corpus(spec);
  cooc::write_forward(corpus.collection, cooc::forward_path(out));
  cooc::write_dictionary(corpus.dictionary, cooc::dictionary_path(out));
  info("generated {} documents, {} postings, {} terms", corpus.collection.size(),
       corpus.collection.postings(), corpus.dictionary.size());
}

int run_gen(const GenArgs& a) {
  auto spec = load_spec(a.spec);
  if (a.seed) spec.seed = *a.seed;
  if (a.docs) spec.doc_count = *a.docs;
  generate_to(spec, a.out);
  return 0;
}

// ---------------------------------------------------------------- bench
struct BenchArgs {
  std::vector<std::string> methods, sizes;
  std::string corpus;
  fs::path out;
  std::uint64_t flush_pairs = 100'000'000;
  std::string block_width = "auto";
  std::size_t accumulators = 100;
  std::optional<std::size_t> max_doc_terms;
  std::size_t naive_max_docs = 10'000;
  bool in_process = false;
  bool keep_runs = false;
  std::size_t repeats = 1;
};

int run_bench(const BenchArgs& a) {
  std::vector<cooc::Method> methods;
  for (const auto& m : a.methods) methods.push_back(cooc::parse_method(m));
  const auto sizes = parse_sizes(a.sizes);
  cooc::BenchOptions options;
  options.block_width_k = parse_block_width(a.block_width);
  options.flush_threshold_pairs = a.flush_pairs;
  options.accumulators_a = a.accumulators;
  options.max_doc_terms = a.max_doc_terms;
  options.naive_max_docs = a.naive_max_docs;
  options.work_limit = g.work_limit;
  options.keep_runs = a.keep_runs;
  options.repeats = a.repeats;
  options.work_dir = temp_dir() / fmt::format("cooc-bench-{}", ::getpid());
  if (!a.in_process) options.executable = fs::read_symlink("/proc/self/exe");

  fs::path prefix = a.corpus;
  constexpr std::string_view kSynthetic = "synthetic:";
  const bool synthetic = a.corpus.rfind(kSynthetic, 0) == 0;
  if (synthetic) {
    const auto spec = load_spec(a.corpus.substr(kSynthetic.size()));
    fs::create_directories(options.work_dir);
    prefix = options.work_dir / "corpus";
    generate_to(spec, prefix);
  }
  const auto reports = cooc::bench_sweep(methods, sizes, prefix, options);
  std::ofstream out(a.out);
  cooc::write_bench_csv(reports, out);
  if (!out) throw cooc::IoError(fmt::format("cannot write {}", a.out.string()));
  if (!a.keep_runs) {
    std::error_code ec;
    fs::remove_all(options.work_dir, ec);
  }
  for (const auto& r : reports) {
    info("{:>12} {:>8} {:>10} {}", r.method, r.doc_count,
         r.status == "ok" ? fmt::format("{:.3f}s", r.wall_time_seconds) : "-", r.status);
  }
  return 0;
}

// ---------------------------------------------------------------- export
struct ExportArgs {
  fs::path run, collection, out;
  bool top = false;
};

int run_export(const ExportArgs& a) {
  const auto dict = cooc::read_dictionary(cooc::dictionary_path(a.collection));
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::binary);
    if (!file) throw cooc::IoError(fmt::format("cannot write {}", a.out.string()));
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  if (a.top) {
    if (const auto best = cooc::top_pair(a.run)) {
      out << dict.lookup(best->primary) << '\t' << dict.lookup(best->secondary) << '\t'
          << best->count << '\n';
    }
  } else {
    cooc::export_text(a.run, dict, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact term co-occurrence counting"};
  app.set_version_flag("--version",
                       "cooc 1.0.0 (formats: COOCFWD1 COOCDICT COOCIDX1 COOCRUN1 COOCOFF1)");
  app.require_subcommand(1);
  app.add_flag("--quiet", g.quiet, "Suppress progress messages");
  app.add_option("--temp-dir", g.temp_dir, "Directory for spill files and scratch data");
  app.add_option("--work-limit", g.work_limit,
                 "Largest vocab^2 LIST-PAIRS may attempt without --allow-quadratic");

  int code = 0;

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Tokenize documents into a forward collection");
  c_ingest->add_option("--input", ingest.input, "Directory, text file or .jsonl file")
      ->required()
      ->check(CLI::ExistingPath);
  c_ingest->add_option("--out", ingest.out, "Output prefix (.fwd, .dict)")->required();
  c_ingest->add_option("--limit", ingest.limit, "Ingest only the first N documents");
  c_ingest->callback([&] { code = run_ingest(ingest); });

  IndexArgs index;
  auto* c_index = app.add_subcommand("index", "Build the inverted index");
  c_index->add_option("--collection", index.collection, "Collection prefix")->required();
  c_index->add_option("--out", index.out, "Index file")->required();
  c_index->callback([&] { code = run_index(index); });

  CountArgs count;
  auto* c_count = app.add_subcommand("count", "Count co-occurring term pairs");
  c_count->add_option("--method", count.method, "naive|list-pairs|list-blocks|list-scan|multi-scan")
      ->required()
      ->check(CLI::IsMember({"naive", "list-pairs", "list-blocks", "list-scan", "multi-scan"}));
  c_count->add_option("--collection", count.collection, "Collection prefix")->required();
  c_count->add_option("--index", count.index, "Prebuilt index file")->check(CLI::ExistingFile);
  c_count->add_option("--flush-pairs", count.flush_pairs, "NAIVE spill threshold (distinct pairs)")
      ->check(CLI::PositiveNumber);
  c_count->add_option("--block-width", count.block_width, "LIST-BLOCKS lists per block, or auto");
  c_count->add_option("--accumulators", count.accumulators, "MULTI-SCAN primaries per pass")
      ->check(CLI::PositiveNumber);
  c_count->add_option("--max-doc-terms", count.max_doc_terms, "Cap each document's term count");
  c_count->add_option("--limit", count.limit, "Count only the first N documents");
  c_count->add_option("--report", count.report, "Write a JSON run report");
  c_count->add_flag("--allow-quadratic", count.allow_quadratic,
                    "Let LIST-PAIRS exceed the work limit");
  c_count->add_option("--out", count.out, "Output run file")->required();
  c_count->callback([&] { code = run_count(count); });

  MergeArgs merge;
  auto* c_merge = app.add_subcommand("merge", "Merge sorted run files, summing counts");
  c_merge->add_option("runs", merge.runs, "Input runs")->required()->check(CLI::ExistingFile);
  c_merge->add_option("--out", merge.out, "Merged run file")->required();
  c_merge->add_option("--fan-in", merge.fan_in, "Runs merged at once");
  c_merge->callback([&] { code = run_merge(merge); });

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "Check a run against brute-force counts");
  c_verify->add_option("--collection", verify.collection, "Collection prefix")->required();
  c_verify->add_option("--run", verify.run, "Run file")->required()->check(CLI::ExistingFile);
  c_verify->add_option("--limit", verify.limit, "Use only the first N documents");
  c_verify->callback([&] { code = run_verify(verify); });

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Collection statistics panel");
  c_stats->add_option("--collection", stats.collection, "Collection prefix")->required();
  c_stats->add_option("--run", stats.run, "Run file of the whole collection")
      ->check(CLI::ExistingFile);
  c_stats->add_option("--sizes", stats.sizes, "Prefix sizes, e.g. 1,10,100")->delimiter(',');
  c_stats->add_flag("--pairs", stats.pairs, "Count distinct pairs for each prefix");
  c_stats->add_option("--csv", stats.csv, "Write rows as CSV");
  c_stats->callback([&] { code = run_stats(stats); });

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time and memory sweep over methods and sizes");
  c_bench->add_option("--methods", bench.methods, "Comma-separated methods")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember({"naive", "list-pairs", "list-blocks", "list-scan", "multi-scan"}));
  c_bench->add_option("--sizes", bench.sizes, "Comma-separated prefix sizes")
      ->required()
      ->delimiter(',');
  c_bench->add_option("--corpus", bench.corpus, "Collection prefix or synthetic:<spec.json>")
      ->required();
  c_bench->add_option("--out", bench.out, "CSV output")->required();
  c_bench->add_option("--flush-pairs", bench.flush_pairs, "NAIVE spill threshold")
      ->check(CLI::PositiveNumber);
  c_bench->add_option("--block-width", bench.block_width, "LIST-BLOCKS width or auto");
  c_bench->add_option("--accumulators", bench.accumulators, "MULTI-SCAN primaries per pass")
      ->check(CLI::PositiveNumber);
  c_bench->add_option("--max-doc-terms", bench.max_doc_terms, "Cap each document's term count");
  c_bench->add_option("--naive-max-docs", bench.naive_max_docs,
                      "Skip NAIVE above this many documents");
  c_bench->add_flag("--in-process", bench.in_process, "Run cells without spawning children");
  c_bench->add_flag("--keep-runs", bench.keep_runs, "Keep run files and scratch data");
  c_bench->add_option("--repeat", bench.repeats, "Runs per cell (fastest time is kept)")
      ->check(CLI::PositiveNumber);
  c_bench->callback([&] { code = run_bench(bench); });

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "Generate a synthetic collection");
  c_gen->add_option("--spec", gen.spec, "JSON corpus spec")->required()->check(CLI::ExistingFile);
  c_gen->add_option("--seed", gen.seed, "Override the spec's seed");
  c_gen->add_option("--docs", gen.docs, "Override the spec's document count");
  c_gen->add_option("--out", gen.out, "Output prefix (.fwd, .dict)")->required();
  c_gen->callback([&] { code = run_gen(gen); });

  ExportArgs exp;
  auto* c_export = app.add_subcommand("export", "Print a run as tab-separated term pairs");
  c_export->add_option("--run", exp.run, "Run file")->required()->check(CLI::ExistingFile);
  c_export->add_option("--collection", exp.collection, "Collection prefix (for .dict)")
      ->required();
  c_export->add_option("--out", exp.out, "Output file (default stdout)");
  c_export->add_flag("--top", exp.top, "Only the most frequent pair");
  c_export->callback([&] { code = run_export(exp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const cooc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return code;
}

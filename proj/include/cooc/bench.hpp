#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "cooc/corpus.hpp"
#include "cooc/counters.hpp"
#include "cooc/report.hpp"

namespace cooc {

/// Parameters of the synthetic stand-in for a web collection.
///
/// Document lengths (distinct terms) are lognormal with the given mean and
/// standard deviation, clamped to [min_len, max_len]. Each term slot is a new
/// term with probability heaps_k * heaps_beta * n^(heaps_beta - 1), where n
/// counts postings generated so far, so vocabulary grows as heaps_k * n^beta.
/// Otherwise an existing term is drawn with Zipf(zipf_exponent) over ids,
/// which are in first-encounter order, so low ids are the frequent terms.
struct SyntheticCorpusSpec {
  std::size_t doc_count = 1000;
  double mean_len = 227.1;
  double stddev_len = 221.0;
  std::size_t min_len = 2;
  std::size_t max_len = 73'600;
  double heaps_k = 4.8;
  double heaps_beta = 0.677;
  double zipf_exponent = 1.0;
  std::uint64_t seed = 1;
};

void to_json(nlohmann::json& j, const SyntheticCorpusSpec& s);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, SyntheticCorpusSpec& s);

struct GeneratedCorpus {
  ForwardCollection collection;
  TermDictionary dictionary;
};

/// Deterministic for a fixed spec (seed included). Term strings are `w<id>`.
GeneratedCorpus generate_corpus(const SyntheticCorpusSpec& spec);

struct BenchOptions {
  /// The `cooc` executable; each cell then runs in a fresh child process so
  /// its peak resident set is attributable. Empty runs cells in-process.
  std::filesystem::path executable;
  std::filesystem::path work_dir = std::filesystem::temp_directory_path();
  std::uint64_t flush_threshold_pairs = 100'000'000;
  std::optional<std::size_t> block_width_k;
  std::size_t accumulators_a = 100;
  std::optional<std::size_t> max_doc_terms;
  /// NAIVE cells above this many documents are skipped.
  std::size_t naive_max_docs = 10'000;
  /// LIST-PAIRS cells with vocab^2 above this are skipped.
  std::uint64_t work_limit = 10'000'000'000ull;
  /// Keep run files of executed cells under work_dir.
  bool keep_runs = false;
  /// Runs per cell; the row keeps the fastest wall time and the largest peak.
  std::size_t repeats = 1;
};

/// Runs every (size, method) cell in order over prefixes of the collection
/// stored at `collection_prefix`. Guard trips yield rows with status
/// "skipped: guard"; cell failures yield "error: ..." rows.
std::vector<BenchReport> bench_sweep(std::span<const Method> methods,
                                     std::span<const std::size_t> sizes,
                                     const std::filesystem::path& collection_prefix,
                                     const BenchOptions& options);

/// method, doc_count, wall_time_s, peak_mem_bytes, pairs_emitted,
/// param_flush, param_block_width, param_accumulators, status
void write_bench_csv(std::span<const BenchReport> reports, std::ostream& out);

}  // namespace cooc

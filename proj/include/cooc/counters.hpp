#pragma once

// The five exact co-occurrence counters. Every method writes the same run
// file (see pairstore.hpp): one record per pair of distinct terms
// t1 < t2 that share at least one document, with the number of such
// documents, sorted by (t1, t2). Outputs are byte-identical across methods.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>

#include "cooc/corpus.hpp"
#include "cooc/index.hpp"
#include "cooc/report.hpp"

namespace cooc {

enum class Method { naive, list_pairs, list_blocks, list_scan, multi_scan };

inline constexpr Method kAllMethods[] = {Method::naive, Method::list_pairs, Method::list_blocks,
                                         Method::list_scan, Method::multi_scan};

std::string_view to_string(Method m);
/// Throws ConfigError on an unknown name.
Method parse_method(std::string_view name);

struct CounterConfig {
  Method method = Method::list_scan;
  /// NAIVE spills its accumulator once this many distinct pairs are held.
  std::uint64_t flush_threshold_pairs = 100'000'000;
  /// LIST-BLOCKS lists per block; unset means default_block_width(vocab).
  std::optional<std::size_t> block_width_k;
  /// MULTI-SCAN primary keys per pass.
  std::size_t accumulators_a = 100;
  std::filesystem::path output_path;
  /// NAIVE spill directory; defaults to the output's directory.
  std::filesystem::path temp_dir;
  /// Keep only the first M (lowest-id) terms of each document.
  std::optional<std::size_t> max_doc_terms;
  /// LIST-PAIRS refuses vocab^2 above this unless allow_quadratic is set.
  std::uint64_t work_limit = 10'000'000'000ull;
  bool allow_quadratic = false;
};

/// Work counters of a finished run.
struct CountStats {
  std::uint64_t pairs_emitted = 0;
  std::uint64_t groups = 0;
  std::uint64_t output_bytes = 0;
  std::uint64_t flushes = 0;         // naive: spilled runs
  std::uint64_t blocks = 0;          // list-blocks
  std::uint64_t block_pairings = 0;  // list-blocks: b(b+1)/2
  std::uint64_t passes = 0;          // multi-scan: ceil(vocab / a)
  std::uint64_t docs_skipped = 0;    // multi-scan: fully processed documents
};

CountStats count_naive(const ForwardCollection& collection, const CounterConfig& config);
CountStats count_list_pairs(const InvertedIndex& index, const CounterConfig& config);
CountStats count_list_blocks(std::span<const Block> blocks, const CounterConfig& config);
CountStats count_list_scan(const InvertedIndex& index, const ForwardCollection& collection,
                           const CounterConfig& config);
CountStats count_multi_scan(const ForwardCollection& collection, const CounterConfig& config);

/// Truncates each document to its first `max_terms` terms.
ForwardCollection cap_doc_terms(const ForwardCollection& collection, std::size_t max_terms);

struct CounterInputs {
  const ForwardCollection* collection = nullptr;
  const InvertedIndex* index = nullptr;
};

struct CounterResult {
  CountStats stats;
  BenchReport report;
};

/// Dispatches on config.method and times the run. Throws ConfigError when
/// the method's required input is absent. With max_doc_terms set, the
/// collection is capped and the index rebuilt from it.
CounterResult run_counter(const CounterConfig& config, const CounterInputs& inputs);

}  // namespace cooc

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cooc/corpus.hpp"

namespace cooc {

/// Collection statistics panel; lengths count distinct terms per document.
struct CollectionStats {
  std::uint64_t doc_count = 0;
  double avg_len = 0.0;
  /// False for an empty collection, where avg_len is reported as 0.
  bool avg_defined = false;
  std::uint64_t min_len = 0;
  std::uint64_t max_len = 0;
  /// Population standard deviation.
  double stddev_len = 0.0;
  std::uint64_t postings = 0;
  /// Distinct terms in use.
  std::uint64_t vocab = 0;
  std::optional<std::uint64_t> distinct_pairs;
  std::optional<std::uint64_t> output_bytes;
};

/// With `run`, also reports its tuple count and file size. Throws
/// ConsistencyError if the run names terms the collection does not use.
CollectionStats compute_stats(const ForwardCollection& collection,
                              const std::optional<std::filesystem::path>& run = std::nullopt);

struct SweepOptions {
  /// Count pairs for every prefix (LIST-SCAN into a scratch run).
  bool count_pairs = false;
  std::filesystem::path temp_dir = std::filesystem::temp_directory_path();
};

/// One row per prefix size; sizes must be nondecreasing and within the collection.
std::vector<CollectionStats> stats_sweep(const ForwardCollection& collection,
                                         std::span<const std::size_t> sizes,
                                         const SweepOptions& options = {});

/// Exact integers; optional columns are left empty when absent.
void write_stats_csv(std::span<const CollectionStats> rows, std::ostream& out);

/// Console panel with one column per row and K/M/B magnitudes.
std::string format_stats_table(std::span<const CollectionStats> rows);

/// 3 significant digits with K/M/B suffix: 1160 -> "1.16K", 217000 -> "217K".
std::string human_count(std::uint64_t n);
std::string human_bytes(std::uint64_t n);

}  // namespace cooc

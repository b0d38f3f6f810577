#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace cooc {

/// Timing, memory and work record for one counting run.
struct BenchReport {
  std::string method;
  std::uint64_t doc_count = 0;
  double wall_time_seconds = 0.0;
  /// Unset when the platform exposes no resident-set accounting.
  std::optional<std::uint64_t> peak_memory_bytes;
  std::uint64_t pairs_emitted = 0;
  std::optional<std::uint64_t> param_flush;
  std::optional<std::uint64_t> param_block_width;
  std::optional<std::uint64_t> param_accumulators;
  std::optional<std::uint64_t> param_max_doc_terms;
  // Structural work counters; deterministic for identical inputs.
  std::uint64_t flushes = 0;
  std::uint64_t blocks = 0;
  std::uint64_t block_pairings = 0;
  std::uint64_t passes = 0;
  std::uint64_t output_bytes = 0;
  std::string status = "ok";
  std::string timestamp;
  std::string host;
};

void to_json(nlohmann::json& j, const BenchReport& r);
void from_json(const nlohmann::json& j, BenchReport& r);

/// High-water mark of this process's resident set, in bytes.
std::optional<std::uint64_t> peak_memory_probe();

/// ISO-8601 UTC timestamp of the current time.
std::string utc_timestamp();
/// `sysname release machine` of the running host.
std::string host_descriptor();

}  // namespace cooc

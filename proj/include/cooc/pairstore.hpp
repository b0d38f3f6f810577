#pragma once

// Run files: the on-disk format for pair counts, shared by every counting
// method, by NAIVE's temporary flushes, and by the final merged output.
//
//   magic "COOCRUN1"
//   u64 group_count
//   group_count x { u32 primary, u32 tuple_count, tuple_count x (u32 secondary, u32 count) }
//
// Groups ascend by primary, tuples by secondary, every count is >= 1 and
// every secondary exceeds its primary. Each run has an offset sidecar
// `<run>.idx`: magic "COOCOFF1", u64 n, n x (u32 primary, u64 byte_offset).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cooc/corpus.hpp"
#include "cooc/types.hpp"

namespace cooc {

namespace detail {
class BinaryReader;
class BinaryWriter;
}  // namespace detail

struct GroupOffset {
  TermId primary = 0;
  std::uint64_t offset = 0;

  friend bool operator==(const GroupOffset&, const GroupOffset&) = default;
};

struct RunSummary {
  std::filesystem::path path;
  std::uint64_t groups = 0;
  std::uint64_t tuples = 0;
  std::uint64_t bytes = 0;
  /// Byte offset of each group header, in group order.
  std::vector<GroupOffset> directory;
};

std::filesystem::path sidecar_path(const std::filesystem::path& run);

/// Streams records into a run file. Input must arrive in strictly ascending
/// (primary, secondary) order; violations throw ContractError and the partial
/// file is removed. A writer destroyed before finish() also removes its file.
class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path path);
  ~RunWriter();
  RunWriter(const RunWriter&) = delete;
  RunWriter& operator=(const RunWriter&) = delete;

  void add(const PairRecord& record);
  /// Writes one complete group. Empty groups are dropped.
  void write_group(TermId primary, std::span<const PairTuple> tuples);
  /// Flushes, patches the header, writes the sidecar.
  RunSummary finish();

 private:
  void flush_pending();
  [[noreturn]] void violation(const std::string& what);

  std::filesystem::path path_;
  std::unique_ptr<detail::BinaryWriter> out_;
  RunSummary summary_;
  std::optional<TermId> last_primary_;
  TermId pending_primary_ = 0;
  std::vector<PairTuple> pending_;
  bool finished_ = false;
};

RunSummary write_run(std::span<const PairRecord> records, const std::filesystem::path& path);

/// Sequential reader that validates ordering as it goes; any violation or
/// truncation throws FormatError with the byte offset.
class RunReader {
 public:
  explicit RunReader(const std::filesystem::path& path);
  ~RunReader();
  RunReader(RunReader&&) noexcept;
  RunReader& operator=(RunReader&&) noexcept;

  std::uint64_t group_count() const noexcept { return group_count_; }
  const std::filesystem::path& path() const;

  /// Loads the next group; false once all groups are consumed.
  bool next_group(TermId& primary, std::vector<PairTuple>& tuples);
  /// Record-at-a-time view over the same stream.
  bool next(PairRecord& record);

 private:
  std::unique_ptr<detail::BinaryReader> in_;
  std::uint64_t group_count_ = 0;
  std::uint64_t groups_read_ = 0;
  std::optional<TermId> last_primary_;
  TermId group_primary_ = 0;
  std::vector<PairTuple> group_;
  std::size_t group_pos_ = 0;
};

std::vector<PairRecord> read_run(const std::filesystem::path& path);

std::vector<GroupOffset> read_offsets(const std::filesystem::path& sidecar);

/// Looks up one primary's tuples through the sidecar without scanning the run.
std::optional<std::vector<PairTuple>> find_group(const std::filesystem::path& run,
                                                 TermId primary);

/// Runs opened at once by merge_runs; wider merges proceed in rounds.
inline constexpr std::size_t kDefaultMergeFanIn = 64;

/// Merges sorted runs into one, summing counts of equal keys. The result is
/// independent of input order and of the fan-in.
RunSummary merge_runs(std::span<const std::filesystem::path> runs,
                      const std::filesystem::path& out,
                      std::size_t fan_in = kDefaultMergeFanIn);

/// `<term1>\t<term2>\t<count>\n` per record, in run order.
void export_text(const std::filesystem::path& run, const TermDictionary& dict, std::ostream& out);

/// The record with the largest count; ties go to the earliest in run order.
std::optional<PairRecord> top_pair(const std::filesystem::path& run);

}  // namespace cooc

#include "cooc/pairstore.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "cooc/error.hpp"

namespace cooc {

namespace {

constexpr std::string_view kRunMagic = "COOCRUN1";
constexpr std::string_view kOffsetMagic = "COOCOFF1";
constexpr std::uint64_t kGroupCountOffset = 8;
constexpr std::uint64_t kHeaderSize = 16;

static_assert(sizeof(PairTuple) == 8, "tuples are written as two packed u32");

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& run) {
  return std::filesystem::path(run.string() + ".idx");
}

RunWriter::RunWriter(std::filesystem::path path)
    : path_(std::move(path)), out_(std::make_unique<detail::BinaryWriter>(path_)) {
  summary_.path = path_;
  out_->write_magic(kRunMagic);
  out_->write_u64(0);
}

RunWriter::~RunWriter() {
  if (finished_) return;
  out_.reset();
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

void RunWriter::violation(const std::string& what) {
  finished_ = true;
  out_.reset();
  std::error_code ec;
  std::filesystem::remove(path_, ec);
  throw ContractError(fmt::format("{}: {}", path_.string(), what));
}

void RunWriter::add(const PairRecord& r) {
  if (finished_) throw ContractError("write to a finished run");
  if (r.count == 0) violation(fmt::format("zero count for ({}, {})", r.primary, r.secondary));
  if (r.secondary <= r.primary) {
    violation(fmt::format("secondary {} does not exceed primary {}", r.secondary, r.primary));
  }
  if (!pending_.empty() && r.primary == pending_primary_) {
    if (r.secondary <= pending_.back().secondary) {
      violation(fmt::format("record ({}, {}) out of order or duplicated", r.primary, r.secondary));
    }
  } else {
    const auto last = pending_.empty() ? last_primary_ : std::optional<TermId>(pending_primary_);
    if (last && r.primary <= *last) {
      violation(fmt::format("primary {} out of order after {}", r.primary, *last));
    }
    flush_pending();
    pending_primary_ = r.primary;
  }
  pending_.push_back({r.secondary, r.count});
}

void RunWriter::write_group(TermId primary, std::span<const PairTuple> tuples) {
  if (finished_) throw ContractError("write to a finished run");
  flush_pending();
  if (tuples.empty()) return;
  if (last_primary_ && primary <= *last_primary_) {
    violation(fmt::format("primary {} out of order after {}", primary, *last_primary_));
  }
  TermId floor = primary;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (tuples[i].secondary <= floor) {
      violation(fmt::format("group {} tuple {} (secondary {}) out of order", primary, i,
                            tuples[i].secondary));
    }
    if (tuples[i].count == 0) {
      violation(fmt::format("zero count for ({}, {})", primary, tuples[i].secondary));
    }
    floor = tuples[i].secondary;
  }
  summary_.directory.push_back({primary, out_->offset()});
  out_->write_u32(primary);
  out_->write_u32(static_cast<std::uint32_t>(tuples.size()));
  out_->write_bytes(tuples.data(), tuples.size_bytes());
  ++summary_.groups;
  summary_.tuples += tuples.size();
  last_primary_ = primary;
}

void RunWriter::flush_pending() {
  if (pending_.empty()) return;
  auto group = std::move(pending_);
  pending_.clear();
  write_group(pending_primary_, group);
  pending_ = std::move(group);
  pending_.clear();
}

RunSummary RunWriter::finish() {
  if (finished_) throw ContractError("run already finished");
  flush_pending();
  out_->patch_u64(kGroupCountOffset, summary_.groups);
  summary_.bytes = out_->offset();
  out_->close();
  out_.reset();

  detail::BinaryWriter side(sidecar_path(path_));
  side.write_magic(kOffsetMagic);
  side.write_u64(summary_.directory.size());
  for (const auto& g : summary_.directory) {
    side.write_u32(g.primary);
    side.write_u64(g.offset);
  }
  side.close();
  finished_ = true;
  return std::move(summary_);
}

RunSummary write_run(std::span<const PairRecord> records, const std::filesystem::path& path) {
  RunWriter writer(path);
  for (const auto& r : records) writer.add(r);
  return writer.finish();
}

RunReader::RunReader(const std::filesystem::path& path)
    : in_(std::make_unique<detail::BinaryReader>(path)) {
  in_->expect_magic(kRunMagic);
  group_count_ = in_->read_u64();
}

RunReader::~RunReader() = default;
RunReader::RunReader(RunReader&&) noexcept = default;
RunReader& RunReader::operator=(RunReader&&) noexcept = default;

const std::filesystem::path& RunReader::path() const { return in_->path(); }

bool RunReader::next_group(TermId& primary, std::vector<PairTuple>& tuples) {
  if (groups_read_ == group_count_) {
    if (!in_->at_end()) in_->fail("trailing bytes after last group");
    return false;
  }
  const auto start = in_->offset();
  primary = in_->read_u32();
  const std::uint32_t n = in_->read_u32();
  if (n == 0) in_->fail_at(start, fmt::format("empty group for primary {}", primary));
  if (last_primary_ && primary <= *last_primary_) {
    in_->fail_at(start, fmt::format("primary {} out of order after {}", primary, *last_primary_));
  }
  if (n > (in_->file_size() - in_->offset()) / sizeof(PairTuple)) {
    in_->fail_at(start, fmt::format("truncated group for primary {}", primary));
  }
  tuples.resize(n);
  const auto body = in_->offset();
  in_->read_bytes(tuples.data(), n * sizeof(PairTuple));
  TermId floor = primary;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (tuples[i].secondary <= floor) {
      in_->fail_at(body + i * sizeof(PairTuple),
                   fmt::format("secondary {} out of order in group {}", tuples[i].secondary,
                               primary));
    }
    if (tuples[i].count == 0) {
      in_->fail_at(body + i * sizeof(PairTuple) + 4, "zero count");
    }
    floor = tuples[i].secondary;
  }
  last_primary_ = primary;
  ++groups_read_;
  return true;
}

bool RunReader::next(PairRecord& record) {
  while (group_pos_ == group_.size()) {
    group_pos_ = 0;
    if (!next_group(group_primary_, group_)) {
      group_.clear();
      return false;
    }
  }
  const auto& t = group_[group_pos_++];
  record = {group_primary_, t.secondary, t.count};
  return true;
}

std::vector<PairRecord> read_run(const std::filesystem::path& path) {
  RunReader reader(path);
  std::vector<PairRecord> out;
  PairRecord r;
  while (reader.next(r)) out.push_back(r);
  return out;
}

std::vector<GroupOffset> read_offsets(const std::filesystem::path& sidecar) {
  detail::BinaryReader in(sidecar);
  in.expect_magic(kOffsetMagic);
  const std::uint64_t n = in.read_u64();
  if (n > (in.file_size() - in.offset()) / 12) in.fail("truncated offset directory");
  std::vector<GroupOffset> out(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out[i].primary = in.read_u32();
    out[i].offset = in.read_u64();
    if (i > 0 && out[i].primary <= out[i - 1].primary) {
      in.fail_at(in.offset() - 12, "offset directory not ascending");
    }
  }
  if (!in.at_end()) in.fail("trailing bytes after offset directory");
  return out;
}

std::optional<std::vector<PairTuple>> find_group(const std::filesystem::path& run,
                                                 TermId primary) {
  const auto directory = read_offsets(sidecar_path(run));
  const auto it = std::lower_bound(
      directory.begin(), directory.end(), primary,
      [](const GroupOffset& g, TermId p) { return g.primary < p; });
  if (it == directory.end() || it->primary != primary) return std::nullopt;

  detail::BinaryReader in(run);
  in.expect_magic(kRunMagic);
  if (it->offset < kHeaderSize) in.fail_at(it->offset, "offset inside header");
  in.seek(it->offset);
  if (in.read_u32() != primary) in.fail_at(it->offset, "sidecar offset does not match group");
  const std::uint32_t n = in.read_u32();
  if (n > (in.file_size() - in.offset()) / sizeof(PairTuple)) {
    in.fail_at(it->offset, "truncated group");
  }
  std::vector<PairTuple> tuples(n);
  in.read_bytes(tuples.data(), n * sizeof(PairTuple));
  return tuples;
}

namespace {

RunSummary merge_once(std::span<const std::filesystem::path> runs,
                      const std::filesystem::path& out) {
  std::vector<RunReader> readers;
  readers.reserve(runs.size());
  for (const auto& p : runs) readers.emplace_back(p);

  using Entry = std::pair<std::uint64_t, std::size_t>;  // (key, reader)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<PairRecord> head(readers.size());
  for (std::size_t i = 0; i < readers.size(); ++i) {
    if (readers[i].next(head[i])) heap.emplace(pair_key(head[i].primary, head[i].secondary), i);
  }

  RunWriter writer(out);
  while (!heap.empty()) {
    const auto [key, first] = heap.top();
    PairRecord merged = head[first];
    std::uint64_t sum = 0;
    while (!heap.empty() && heap.top().first == key) {
      const std::size_t i = heap.top().second;
      heap.pop();
      sum += head[i].count;
      if (readers[i].next(head[i])) heap.emplace(pair_key(head[i].primary, head[i].secondary), i);
    }
    if (sum > std::numeric_limits<PairCount>::max()) {
      throw RangeError(fmt::format("count overflow merging pair ({}, {})", merged.primary,
                                   merged.secondary));
    }
    merged.count = static_cast<PairCount>(sum);
    writer.add(merged);
  }
  return writer.finish();
}

void remove_run(const std::filesystem::path& run) {
  std::error_code ec;
  std::filesystem::remove(run, ec);
  std::filesystem::remove(sidecar_path(run), ec);
}

}  // namespace

RunSummary merge_runs(std::span<const std::filesystem::path> runs,
                      const std::filesystem::path& out, std::size_t fan_in) {
  if (fan_in < 2) throw ConfigError("merge fan-in must be at least 2");
  if (runs.size() <= fan_in) return merge_once(runs, out);

  // Too many runs to open at once: merge in rounds through temporaries next to `out`.
  std::vector<std::filesystem::path> level(runs.begin(), runs.end());
  std::vector<std::filesystem::path> owned;
  std::size_t round = 0;
  try {
    while (level.size() > fan_in) {
      std::vector<std::filesystem::path> next;
      for (std::size_t i = 0; i < level.size(); i += fan_in) {
        const auto chunk = std::span(level).subspan(i, std::min(fan_in, level.size() - i));
        auto tmp = std::filesystem::path(fmt::format("{}.merge{}-{}", out.string(), round,
                                                     next.size()));
        merge_once(chunk, tmp);
        next.push_back(tmp);
        owned.push_back(tmp);
      }
      level = std::move(next);
      ++round;
    }
    auto summary = merge_once(level, out);
    for (const auto& p : owned) remove_run(p);
    return summary;
  } catch (...) {
    for (const auto& p : owned) remove_run(p);
    throw;
  }
}

void export_text(const std::filesystem::path& run, const TermDictionary& dict,
                 std::ostream& out) {
  RunReader reader(run);
  PairRecord r;
  while (reader.next(r)) {
    out << dict.lookup(r.primary) << '\t' << dict.lookup(r.secondary) << '\t' << r.count << '\n';
  }
  if (!out) throw IoError("text export failed");
}

std::optional<PairRecord> top_pair(const std::filesystem::path& run) {
  RunReader reader(run);
  std::optional<PairRecord> best;
  PairRecord r;
  while (reader.next(r)) {
    if (!best || r.count > best->count) best = r;
  }
  return best;
}

}  // namespace cooc

#include "cooc/counters.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <limits>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <fmt/format.h>

#include "cooc/error.hpp"
#include "cooc/pairstore.hpp"

namespace cooc {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::naive: return "naive";
    case Method::list_pairs: return "list-pairs";
    case Method::list_blocks: return "list-blocks";
    case Method::list_scan: return "list-scan";
    case Method::multi_scan: return "multi-scan";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError(fmt::format(
      "unknown method '{}' (expected naive, list-pairs, list-blocks, list-scan or multi-scan)",
      name));
}

namespace {

CountStats finish(RunWriter& writer, CountStats stats = {}) {
  const RunSummary summary = writer.finish();
  stats.pairs_emitted = summary.tuples;
  stats.groups = summary.groups;
  stats.output_bytes = summary.bytes;
  return stats;
}

CountStats stats_from(const RunSummary& summary, CountStats stats = {}) {
  stats.pairs_emitted = summary.tuples;
  stats.groups = summary.groups;
  stats.output_bytes = summary.bytes;
  return stats;
}

// Removes a scratch directory on scope exit.
class ScratchDir {
 public:
  explicit ScratchDir(std::filesystem::path p) : path_(std::move(p)) {
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path spill_root(const CounterConfig& config) {
  if (!config.temp_dir.empty()) return config.temp_dir;
  auto parent = config.output_path.parent_path();
  return parent.empty() ? std::filesystem::path(".") : parent;
}

void sort_tuples(std::vector<PairTuple>& tuples) {
  std::sort(tuples.begin(), tuples.end(),
            [](const PairTuple& a, const PairTuple& b) { return a.secondary < b.secondary; });
}

}  // namespace

// NAIVE: every in-document pair bumps a pair-keyed accumulator, spilled as a
// sorted run whenever it holds flush_threshold_pairs distinct pairs.
CountStats count_naive(const ForwardCollection& collection, const CounterConfig& config) {
  if (config.flush_threshold_pairs < 1) throw ConfigError("flush threshold must be at least 1");

  ScratchDir scratch(spill_root(config) /
                     fmt::format("{}.spill-{}", config.output_path.filename().string(), getpid()));
  absl::flat_hash_map<std::uint64_t, PairCount> acc;
  std::vector<std::filesystem::path> runs;
  CountStats stats;

  auto spill = [&acc](const std::filesystem::path& path) {
    std::vector<std::pair<std::uint64_t, PairCount>> items(acc.begin(), acc.end());
    acc.clear();
    std::sort(items.begin(), items.end());
    RunWriter writer(path);
    for (const auto& [key, count] : items) {
      writer.add({static_cast<TermId>(key >> 32), static_cast<TermId>(key), count});
    }
    return writer.finish();
  };
  auto next_run = [&] { return scratch.path() / fmt::format("run-{:06}", runs.size()); };

  for (DocId d = 0; d < collection.size(); ++d) {
    const auto terms = collection.doc(d);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        ++acc[pair_key(terms[i], terms[j])];
        if (acc.size() >= config.flush_threshold_pairs) {
          runs.push_back(next_run());
          spill(runs.back());
          ++stats.flushes;
        }
      }
    }
  }

  if (runs.empty()) return stats_from(spill(config.output_path), stats);
  if (!acc.empty()) {
    runs.push_back(next_run());
    spill(runs.back());
  }
  return stats_from(merge_runs(runs, config.output_path), stats);
}

// LIST-PAIRS: intersect the postings of every candidate pair t1 < t2.
CountStats count_list_pairs(const InvertedIndex& index, const CounterConfig& config) {
  const std::uint64_t vocab = index.vocab_size();
  if (!config.allow_quadratic && vocab * vocab > config.work_limit) {
    throw ConfigError(fmt::format(
        "list-pairs over {} terms needs {} candidate pairs, above the work limit of {}; "
        "raise the limit or allow quadratic work explicitly",
        vocab, vocab * vocab, config.work_limit));
  }
  RunWriter writer(config.output_path);
  std::vector<PairTuple> tuples;
  for (TermId t1 = 0; t1 < vocab; ++t1) {
    const auto a = index.postings(t1);
    if (a.empty()) continue;
    tuples.clear();
    for (TermId t2 = t1 + 1; t2 < vocab; ++t2) {
      const auto b = index.postings(t2);
      if (b.empty()) continue;
      if (const auto n = intersect(a, b); n > 0) {
        tuples.push_back({t2, static_cast<PairCount>(n)});
      }
    }
    writer.write_group(t1, tuples);
  }
  return finish(writer);
}

// LIST-BLOCKS: block nested loop over contiguous term-range blocks. While a
// block is outer its terms are primaries; each (outer, inner) pairing
// accumulates into a dense outer-width x k matrix that is drained into
// per-primary buffers, in ascending secondary order, before the next pairing.
CountStats count_list_blocks(std::span<const Block> blocks, const CounterConfig& config) {
  std::size_t stride = 1;
  std::size_t doc_bound = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (b.end_term < b.first_term || (i > 0 && b.first_term != blocks[i - 1].end_term)) {
      throw ContractError(fmt::format("block {} does not continue the previous term range", i));
    }
    stride = std::max(stride, b.width());
    if (!b.docs.empty()) doc_bound = std::max<std::size_t>(doc_bound, b.docs.back() + 1ull);
  }

  constexpr std::size_t kMaxCells = std::size_t{1} << 28;
  if (stride * stride > kMaxCells) {
    throw ConfigError(fmt::format("block width {} needs a {}x{} accumulator matrix; use a smaller "
                                  "width",
                                  stride, stride, stride));
  }

  constexpr auto kAbsent = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> outer_pos(doc_bound, kAbsent);
  std::vector<PairCount> cells;
  std::vector<std::uint32_t> touched;
  std::vector<std::vector<PairTuple>> out;
  RunWriter writer(config.output_path);
  CountStats stats;
  stats.blocks = blocks.size();

  auto bump = [&](std::size_t cell) {
    if (cells[cell]++ == 0) touched.push_back(static_cast<std::uint32_t>(cell));
  };
  auto drain = [&](std::size_t rows, const Block& inner) {
    const std::size_t cols = inner.width();
    auto take = [&](std::size_t cell) {
      out[cell / stride].push_back({static_cast<TermId>(inner.first_term + cell % stride),
                                    cells[cell]});
      cells[cell] = 0;
    };
    if (touched.size() * 8 > rows * cols) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          if (cells[r * stride + c] != 0) take(r * stride + c);
        }
      }
    } else {
      std::sort(touched.begin(), touched.end());
      for (auto cell : touched) take(cell);
    }
    touched.clear();
  };

  cells.assign(stride * stride, 0);
  out.resize(stride);
  for (std::size_t o = 0; o < blocks.size(); ++o) {
    const Block& outer = blocks[o];
    const std::size_t rows = outer.width();
    for (std::size_t i = 0; i < outer.docs.size(); ++i) {
      outer_pos[outer.docs[i]] = static_cast<std::uint32_t>(i);
    }

    // Pairs within the outer block's own mini-documents.
    for (std::size_t i = 0; i < outer.docs.size(); ++i) {
      const auto mini = outer.mini_doc(i);
      for (std::size_t x = 0; x < mini.size(); ++x) {
        const std::size_t row = (mini[x] - outer.first_term) * stride;
        for (std::size_t y = x + 1; y < mini.size(); ++y) bump(row + mini[y] - outer.first_term);
      }
    }
    drain(rows, outer);
    ++stats.block_pairings;

    for (std::size_t in = o + 1; in < blocks.size(); ++in) {
      const Block& inner = blocks[in];
      for (std::size_t j = 0; j < inner.docs.size(); ++j) {
        const std::uint32_t p = outer_pos[inner.docs[j]];
        if (p == kAbsent) continue;
        const auto primaries = outer.mini_doc(p);
        const auto secondaries = inner.mini_doc(j);
        for (TermId x : primaries) {
          const std::size_t row = (x - outer.first_term) * stride;
          for (TermId y : secondaries) bump(row + (y - inner.first_term));
        }
      }
      drain(rows, inner);
      ++stats.block_pairings;
    }

    for (std::size_t r = 0; r < rows; ++r) {
      writer.write_group(static_cast<TermId>(outer.first_term + r), out[r]);
      std::vector<PairTuple>().swap(out[r]);
    }
    for (DocId d : outer.docs) outer_pos[d] = kAbsent;
  }
  return finish(writer, stats);
}

// LIST-SCAN: one primary at a time, walk its postings and count the larger
// terms of each referenced forward document.
CountStats count_list_scan(const InvertedIndex& index, const ForwardCollection& collection,
                           const CounterConfig& config) {
  const std::size_t vocab = index.vocab_size();
  if (collection.term_bound() > vocab || index.doc_count() > collection.size()) {
    throw ConsistencyError("index and forward collection describe different collections");
  }
  std::vector<PairCount> counts(vocab, 0);
  std::vector<TermId> touched;
  std::vector<PairTuple> tuples;
  // Primaries ascend and so do document terms, so t sits at position
  // cursor[d] of document d: no search needed.
  std::vector<std::uint32_t> cursor(collection.size(), 0);
  RunWriter writer(config.output_path);

  for (TermId t = 0; t < vocab; ++t) {
    for (DocId d : index.postings(t)) {
      const auto doc = collection.doc(d);
      const std::uint32_t pos = cursor[d]++;
      if (pos >= doc.size() || doc[pos] != t) {
        throw ConsistencyError(fmt::format("document {} does not contain term {}", d, t));
      }
      for (auto it = doc.begin() + pos + 1; it != doc.end(); ++it) {
        if (counts[*it]++ == 0) touched.push_back(*it);
      }
    }
    if (touched.empty()) continue;

    tuples.clear();
    const std::size_t span = vocab - t - 1;
    if (touched.size() * 16 > span) {
      for (std::size_t u = t + 1; u < vocab; ++u) {
        if (counts[u] != 0) {
          tuples.push_back({static_cast<TermId>(u), counts[u]});
          counts[u] = 0;
        }
      }
    } else {
      std::sort(touched.begin(), touched.end());
      for (TermId u : touched) {
        tuples.push_back({u, counts[u]});
        counts[u] = 0;
      }
    }
    touched.clear();
    writer.write_group(t, tuples);
  }
  return finish(writer);
}

// MULTI-SCAN: each pass takes the next `a` term ids as primaries and scans
// all forward documents, skipping those whose terms all precede the pass.
CountStats count_multi_scan(const ForwardCollection& collection, const CounterConfig& config) {
  const std::size_t a = config.accumulators_a;
  if (a < 1) throw ConfigError("accumulator count must be at least 1");
  const std::size_t vocab = collection.term_bound();
  std::vector<absl::flat_hash_map<TermId, PairCount>> tables(std::min(a, vocab));
  std::vector<PairTuple> tuples;
  RunWriter writer(config.output_path);
  CountStats stats;

  for (std::size_t lo = 0; lo < vocab; lo += a) {
    const std::size_t hi = std::min(lo + a, vocab);
    ++stats.passes;
    for (DocId d = 0; d < collection.size(); ++d) {
      const auto doc = collection.doc(d);
      if (doc.empty() || doc.back() < lo) {
        ++stats.docs_skipped;
        continue;
      }
      for (auto it = std::lower_bound(doc.begin(), doc.end(), static_cast<TermId>(lo));
           it != doc.end() && *it < hi; ++it) {
        auto& table = tables[*it - lo];
        for (auto u = it + 1; u != doc.end(); ++u) ++table[*u];
      }
    }
    for (std::size_t p = lo; p < hi; ++p) {
      auto& table = tables[p - lo];
      tuples.clear();
      for (const auto& [u, n] : table) tuples.push_back({u, n});
      sort_tuples(tuples);
      writer.write_group(static_cast<TermId>(p), tuples);
      table.clear();
    }
  }
  return finish(writer, stats);
}

ForwardCollection cap_doc_terms(const ForwardCollection& collection, std::size_t max_terms) {
  ForwardCollection out;
  for (DocId d = 0; d < collection.size(); ++d) {
    const auto doc = collection.doc(d);
    out.append(doc.first(std::min(max_terms, doc.size())));
  }
  return out;
}

CounterResult run_counter(const CounterConfig& config, const CounterInputs& inputs) {
  const ForwardCollection* collection = inputs.collection;
  const InvertedIndex* index = inputs.index;
  const bool needs_collection = config.method == Method::naive ||
                                config.method == Method::list_scan ||
                                config.method == Method::multi_scan;
  const bool needs_index = config.method == Method::list_pairs ||
                           config.method == Method::list_blocks ||
                           config.method == Method::list_scan;
  if (config.output_path.empty()) throw ConfigError("no output path given");
  if (needs_collection && !collection) {
    throw ConfigError(fmt::format("{} requires the forward collection", to_string(config.method)));
  }
  if (needs_index && !index) {
    throw ConfigError(fmt::format("{} requires the inverted index", to_string(config.method)));
  }

  ForwardCollection capped;
  InvertedIndex capped_index;
  if (config.max_doc_terms) {
    if (!collection) {
      throw ConfigError("capping document length requires the forward collection");
    }
    capped = cap_doc_terms(*collection, *config.max_doc_terms);
    collection = &capped;
    if (needs_index) {
      capped_index = build_index(capped, index->vocab_size());
      index = &capped_index;
    }
  }

  BenchReport report;
  report.method = std::string(to_string(config.method));
  report.doc_count = collection ? collection->size() : index->doc_count();
  report.param_max_doc_terms = config.max_doc_terms;

  const auto start = std::chrono::steady_clock::now();
  CountStats stats;
  switch (config.method) {
    case Method::naive:
      report.param_flush = config.flush_threshold_pairs;
      stats = count_naive(*collection, config);
      break;
    case Method::list_pairs:
      stats = count_list_pairs(*index, config);
      break;
    case Method::list_blocks: {
      const std::size_t k = config.block_width_k.value_or(default_block_width(index->vocab_size()));
      report.param_block_width = k;
      const auto blocks = build_blocks(*index, k);
      stats = count_list_blocks(blocks, config);
      break;
    }
    case Method::list_scan:
      stats = count_list_scan(*index, *collection, config);
      break;
    case Method::multi_scan:
      report.param_accumulators = config.accumulators_a;
      stats = count_multi_scan(*collection, config);
      break;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  report.wall_time_seconds = elapsed.count();
  report.peak_memory_bytes = peak_memory_probe();
  report.pairs_emitted = stats.pairs_emitted;
  report.flushes = stats.flushes;
  report.blocks = stats.blocks;
  report.block_pairings = stats.block_pairings;
  report.passes = stats.passes;
  report.output_bytes = stats.output_bytes;
  report.timestamp = utc_timestamp();
  report.host = host_descriptor();
  return {stats, report};
}

}  // namespace cooc

#include "cooc/stats.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "cooc/counters.hpp"
#include "cooc/error.hpp"
#include "cooc/index.hpp"
#include "cooc/pairstore.hpp"

namespace cooc {

namespace {

CollectionStats stats_over(const ForwardCollection& collection, std::size_t n) {
  CollectionStats s;
  s.doc_count = n;
  if (n == 0) return s;

  std::vector<bool> seen(collection.term_bound(), false);
  s.min_len = std::numeric_limits<std::uint64_t>::max();
  for (DocId d = 0; d < n; ++d) {
    const auto doc = collection.doc(d);
    s.postings += doc.size();
    s.min_len = std::min<std::uint64_t>(s.min_len, doc.size());
    s.max_len = std::max<std::uint64_t>(s.max_len, doc.size());
    for (TermId t : doc) {
      if (!seen[t]) {
        seen[t] = true;
        ++s.vocab;
      }
    }
  }
  s.avg_defined = true;
  s.avg_len = static_cast<double>(s.postings) / static_cast<double>(n);
  double sq = 0.0;
  for (DocId d = 0; d < n; ++d) {
    const double dev = static_cast<double>(collection.doc(d).size()) - s.avg_len;
    sq += dev * dev;
  }
  s.stddev_len = std::sqrt(sq / static_cast<double>(n));
  return s;
}

void attach_run(CollectionStats& s, const ForwardCollection& collection, std::size_t n,
                const std::filesystem::path& run) {
  std::vector<bool> used(collection.term_bound(), false);
  for (DocId d = 0; d < n; ++d) {
    for (TermId t : collection.doc(d)) used[t] = true;
  }
  RunReader reader(run);
  std::uint64_t tuples = 0;
  PairRecord r;
  while (reader.next(r)) {
    if (r.secondary >= used.size() || !used[r.primary] || !used[r.secondary]) {
      throw ConsistencyError(fmt::format(
          "{}: pair ({}, {}) names a term absent from the collection", run.string(), r.primary,
          r.secondary));
    }
    ++tuples;
  }
  s.distinct_pairs = tuples;
  s.output_bytes = std::filesystem::file_size(run);
}

std::string with_suffix(double v, const char* const* suffixes, double base) {
  int i = 0;
  while (v >= base && suffixes[i + 1] != nullptr) {
    v /= base;
    ++i;
  }
  if (i == 0) return fmt::format("{}{}", static_cast<std::uint64_t>(v), suffixes[0]);
  // Three significant digits.
  const int decimals = v >= 100 ? 0 : v >= 10 ? 1 : 2;
  return fmt::format("{:.{}f}{}", v, decimals, suffixes[i]);
}

}  // namespace

CollectionStats compute_stats(const ForwardCollection& collection,
                              const std::optional<std::filesystem::path>& run) {
  CollectionStats s = stats_over(collection, collection.size());
  if (run) attach_run(s, collection, collection.size(), *run);
  return s;
}

std::vector<CollectionStats> stats_sweep(const ForwardCollection& collection,
                                         std::span<const std::size_t> sizes,
                                         const SweepOptions& options) {
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] > collection.size()) {
      throw RangeError(fmt::format("prefix size {} exceeds collection size {}", sizes[i],
                                   collection.size()));
    }
    if (i > 0 && sizes[i] < sizes[i - 1]) throw RangeError("prefix sizes must be ascending");
  }
  std::vector<CollectionStats> rows;
  for (std::size_t n : sizes) {
    CollectionStats s = stats_over(collection, n);
    if (options.count_pairs) {
      const auto prefix = take_prefix(collection, n);
      CounterConfig config;
      config.method = Method::list_scan;
      config.output_path = options.temp_dir / fmt::format("cooc-sweep-{}-{}.run", getpid(), n);
      const auto index = build_index(prefix);
      count_list_scan(index, prefix, config);
      attach_run(s, collection, n, config.output_path);
      std::error_code ec;
      std::filesystem::remove(config.output_path, ec);
      std::filesystem::remove(sidecar_path(config.output_path), ec);
    }
    rows.push_back(s);
  }
  return rows;
}

void write_stats_csv(std::span<const CollectionStats> rows, std::ostream& out) {
  out << "doc_count,avg_len,min_len,max_len,stddev_len,postings,vocab,distinct_pairs,"
         "output_bytes\n";
  auto opt = [](const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const auto& s : rows) {
    out << fmt::format("{},{:.6f},{},{},{:.6f},{},{},{},{}\n", s.doc_count, s.avg_len, s.min_len,
                       s.max_len, s.stddev_len, s.postings, s.vocab, opt(s.distinct_pairs),
                       opt(s.output_bytes));
  }
}

std::string human_count(std::uint64_t n) {
  static const char* const kSuffixes[] = {"", "K", "M", "B", "T", nullptr};
  return with_suffix(static_cast<double>(n), kSuffixes, 1000.0);
}

std::string human_bytes(std::uint64_t n) {
  static const char* const kSuffixes[] = {"B", "KB", "MB", "GB", "TB", nullptr};
  return with_suffix(static_cast<double>(n), kSuffixes, 1000.0);
}

std::string format_stats_table(std::span<const CollectionStats> rows) {
  std::vector<std::pair<std::string, std::vector<std::string>>> lines = {
      {"Number of documents", {}},
      {"Average document length", {}},
      {"Minimum document length", {}},
      {"Maximum document length", {}},
      {"Document length standard deviation", {}},
      {"Number of postings", {}},
      {"Vocabulary size", {}},
      {"Number of distinct co-oc pairs", {}},
      {"Output size on disk", {}},
  };
  for (const auto& s : rows) {
    lines[0].second.push_back(std::to_string(s.doc_count));
    lines[1].second.push_back(s.avg_defined ? fmt::format("{:.1f}", s.avg_len) : "n/a");
    lines[2].second.push_back(human_count(s.min_len));
    lines[3].second.push_back(human_count(s.max_len));
    lines[4].second.push_back(s.stddev_len < 100 ? fmt::format("{:.1f}", s.stddev_len)
                                                 : human_count(std::llround(s.stddev_len)));
    lines[5].second.push_back(human_count(s.postings));
    lines[6].second.push_back(human_count(s.vocab));
    lines[7].second.push_back(s.distinct_pairs ? human_count(*s.distinct_pairs) : "-");
    lines[8].second.push_back(s.output_bytes ? human_bytes(*s.output_bytes) : "-");
  }
  std::size_t label_width = 0;
  for (const auto& [label, cells] : lines) label_width = std::max(label_width, label.size());
  std::string out;
  for (const auto& [label, cells] : lines) {
    out += fmt::format("{:<{}}", label, label_width);
    for (const auto& c : cells) out += fmt::format(" {:>9}", c);
    out += '\n';
  }
  return out;
}

}  // namespace cooc

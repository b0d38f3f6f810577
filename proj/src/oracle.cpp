#include "cooc/oracle.hpp"

#include <fmt/format.h>

#include "cooc/error.hpp"
#include "cooc/pairstore.hpp"

namespace cooc {

OracleResult brute_force_count(const ForwardCollection& collection, std::uint64_t limit) {
  std::uint64_t candidates = 0;
  for (DocId d = 0; d < collection.size(); ++d) {
    const std::uint64_t n = collection.doc(d).size();
    if (n > 1) candidates += n * (n - 1) / 2;
  }
  if (candidates > limit) {
    throw SizeError(fmt::format(
        "{} in-document pairs exceed the oracle limit of {}; verify a smaller prefix instead",
        candidates, limit));
  }
  OracleResult result;
  for (DocId d = 0; d < collection.size(); ++d) {
    const auto terms = collection.doc(d);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        result[{terms[i], terms[j]}] += 1;
      }
    }
  }
  return result;
}

Verdict compare(const std::filesystem::path& run, const OracleResult& oracle) {
  Verdict verdict;
  RunReader reader(run);
  auto expected = oracle.begin();
  PairRecord got;
  bool have = reader.next(got);
  while (have || expected != oracle.end()) {
    if (!have) {
      verdict.missing.push_back({expected->first.first, expected->first.second, expected->second});
      ++expected;
      continue;
    }
    const std::pair<TermId, TermId> key{got.primary, got.secondary};
    if (expected == oracle.end() || key < expected->first) {
      verdict.extra.push_back(got);
      have = reader.next(got);
    } else if (expected->first < key) {
      verdict.missing.push_back({expected->first.first, expected->first.second, expected->second});
      ++expected;
    } else {
      if (got.count != expected->second) {
        verdict.mismatches.push_back({got.primary, got.secondary, expected->second, got.count});
      }
      ++expected;
      have = reader.next(got);
    }
  }
  return verdict;
}

std::string format_verdict(const Verdict& verdict, std::size_t max_lines) {
  if (verdict.pass()) return "PASS: run matches brute-force counts\n";
  std::string out = fmt::format("FAIL: {} missing, {} extra, {} count mismatches\n",
                                verdict.missing.size(), verdict.extra.size(),
                                verdict.mismatches.size());
  auto section = [&](const auto& items, auto&& line) {
    for (std::size_t i = 0; i < items.size() && i < max_lines; ++i) out += line(items[i]);
    if (items.size() > max_lines) out += fmt::format("  ... {} more\n", items.size() - max_lines);
  };
  section(verdict.missing, [](const PairRecord& r) {
    return fmt::format("- missing ({}, {}) expected {}\n", r.primary, r.secondary, r.count);
  });
  section(verdict.extra, [](const PairRecord& r) {
    return fmt::format("+ extra   ({}, {}) count {}\n", r.primary, r.secondary, r.count);
  });
  section(verdict.mismatches, [](const CountMismatch& m) {
    return fmt::format("! count   ({}, {}) expected {} got {}\n", m.primary, m.secondary,
                       m.expected, m.actual);
  });
  return out;
}

}  // namespace cooc

#pragma once

// Brute-force reference counter. Deliberately shares no code with the
// counting methods: an ordered map filled pair by pair.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cooc/corpus.hpp"
#include "cooc/types.hpp"

namespace cooc {

using OracleResult = std::map<std::pair<TermId, TermId>, PairCount>;

inline constexpr std::uint64_t kOracleCandidateLimit = 100'000'000;

/// Throws SizeError when the collection has more in-document pairs than `limit`.
OracleResult brute_force_count(const ForwardCollection& collection,
                               std::uint64_t limit = kOracleCandidateLimit);

struct CountMismatch {
  TermId primary = 0;
  TermId secondary = 0;
  PairCount expected = 0;
  PairCount actual = 0;
};

struct Verdict {
  std::vector<PairRecord> missing;  // in the oracle, absent from the run
  std::vector<PairRecord> extra;    // in the run, absent from the oracle
  std::vector<CountMismatch> mismatches;

  bool pass() const { return missing.empty() && extra.empty() && mismatches.empty(); }
};

Verdict compare(const std::filesystem::path& run, const OracleResult& oracle);

/// Textual diff, at most `max_lines` entries per category.
std::string format_verdict(const Verdict& verdict, std::size_t max_lines = 50);

}  // namespace cooc

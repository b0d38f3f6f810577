#pragma once

#include <compare>
#include <cstdint>

namespace cooc {

/// Ordinal term identifier, assigned in first-encounter order.
using TermId = std::uint32_t;
/// Ordinal document identifier, assigned in ingestion order.
using DocId = std::uint32_t;
/// Number of documents in which a pair of terms co-occurs.
using PairCount = std::uint32_t;

/// One co-occurrence result. `primary < secondary` always holds for emitted records.
struct PairRecord {
  TermId primary = 0;
  TermId secondary = 0;
  PairCount count = 0;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
  friend auto operator<=>(const PairRecord&, const PairRecord&) = default;
};

/// Secondary key and count within a primary-key group.
struct PairTuple {
  TermId secondary = 0;
  PairCount count = 0;

  friend bool operator==(const PairTuple&, const PairTuple&) = default;
};

inline constexpr std::uint64_t pair_key(TermId primary, TermId secondary) {
  return (std::uint64_t{primary} << 32) | secondary;
}

}  // namespace cooc

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "cooc/corpus.hpp"
#include "cooc/types.hpp"

namespace cooc {

/// Term -> ascending DocId lists, held in memory as one flat array.
class InvertedIndex {
 public:
  InvertedIndex() = default;

  /// Number of addressable lists (one per TermId, some possibly empty).
  std::size_t vocab_size() const noexcept { return offsets_.size() - 1; }
  std::size_t postings_total() const noexcept { return docs_.size(); }
  /// One past the largest DocId referenced, or the collection size when built from one.
  std::size_t doc_count() const noexcept { return doc_count_; }

  std::span<const DocId> postings(TermId term) const {
    return {docs_.data() + offsets_[term], docs_.data() + offsets_[term + 1]};
  }
  std::size_t df(TermId term) const { return offsets_[term + 1] - offsets_[term]; }

  friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

 private:
  friend InvertedIndex build_index(const ForwardCollection&, std::optional<std::size_t>);
  friend InvertedIndex read_index(const std::filesystem::path&);

  std::vector<std::uint64_t> offsets_{0};
  std::vector<DocId> docs_;
  std::size_t doc_count_ = 0;
};

/// Builds the index with `vocab_size` lists, defaulting to collection.term_bound().
InvertedIndex build_index(const ForwardCollection& collection,
                          std::optional<std::size_t> vocab_size = std::nullopt);

/// Rebuilds the forward documents from the index.
ForwardCollection transpose(const InvertedIndex& index);

/// Size of the intersection of two strictly ascending lists (two-finger merge).
std::size_t intersect(std::span<const DocId> a, std::span<const DocId> b);

/// A contiguous TermId range re-bucketed document-major: for each document
/// containing at least one term of the range, its ascending terms in range.
struct Block {
  std::size_t index = 0;
  TermId first_term = 0;
  TermId end_term = 0;
  std::vector<DocId> docs;             // ascending
  std::vector<std::uint64_t> offsets;  // docs.size() + 1 entries into `terms`
  std::vector<TermId> terms;

  std::size_t width() const noexcept { return end_term - first_term; }
  std::span<const TermId> mini_doc(std::size_t i) const {
    return {terms.data() + offsets[i], terms.data() + offsets[i + 1]};
  }
};

/// Partitions the vocabulary into ceil(vocab / k) blocks of k lists each
/// (the last may be narrower). Throws ConfigError when k == 0.
std::vector<Block> build_blocks(const InvertedIndex& index, std::size_t k);

/// round(sqrt(vocab)), at least 1.
std::size_t default_block_width(std::size_t vocab_size);

void write_index(const InvertedIndex& index, const std::filesystem::path& path);
InvertedIndex read_index(const std::filesystem::path& path);

}  // namespace cooc

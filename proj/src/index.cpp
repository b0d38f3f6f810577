#include "cooc/index.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "cooc/error.hpp"

namespace cooc {

InvertedIndex build_index(const ForwardCollection& collection,
                          std::optional<std::size_t> vocab_size) {
  const std::size_t vocab = vocab_size.value_or(collection.term_bound());
  if (vocab < collection.term_bound()) {
    throw RangeError(fmt::format("vocabulary size {} below largest term id in use {}", vocab,
                                 collection.term_bound() - 1));
  }
  InvertedIndex index;
  index.doc_count_ = collection.size();
  // Counting sort: df per term, then scatter documents in ascending order.
  std::vector<std::uint64_t> offsets(vocab + 1, 0);
  for (DocId d = 0; d < collection.size(); ++d) {
    for (TermId t : collection.doc(d)) ++offsets[t + 1];
  }
  for (std::size_t t = 0; t < vocab; ++t) offsets[t + 1] += offsets[t];
  index.docs_.resize(collection.postings());
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (DocId d = 0; d < collection.size(); ++d) {
    for (TermId t : collection.doc(d)) index.docs_[cursor[t]++] = d;
  }
  index.offsets_ = std::move(offsets);
  return index;
}

ForwardCollection transpose(const InvertedIndex& index) {
  std::vector<std::vector<TermId>> docs(index.doc_count());
  for (TermId t = 0; t < index.vocab_size(); ++t) {
    for (DocId d : index.postings(t)) docs[d].push_back(t);
  }
  ForwardCollection out;
  for (const auto& d : docs) out.append(d);
  return out;
}

std::size_t intersect(std::span<const DocId> a, std::span<const DocId> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::vector<Block> build_blocks(const InvertedIndex& index, std::size_t k) {
  if (k == 0) throw ConfigError("block width must be at least 1");
  const std::size_t vocab = index.vocab_size();
  const std::size_t count = (vocab + k - 1) / k;
  std::vector<Block> blocks;
  blocks.reserve(count);

  std::vector<std::uint32_t> per_doc(index.doc_count(), 0);
  std::vector<std::uint64_t> cursor(index.doc_count(), 0);
  for (std::size_t b = 0; b < count; ++b) {
    Block block;
    block.index = b;
    block.first_term = static_cast<TermId>(b * k);
    block.end_term = static_cast<TermId>(std::min(vocab, (b + 1) * k));

    for (TermId t = block.first_term; t < block.end_term; ++t) {
      for (DocId d : index.postings(t)) {
        if (per_doc[d]++ == 0) block.docs.push_back(d);
      }
    }
    std::sort(block.docs.begin(), block.docs.end());
    block.offsets.resize(block.docs.size() + 1);
    block.offsets[0] = 0;
    for (std::size_t i = 0; i < block.docs.size(); ++i) {
      const DocId d = block.docs[i];
      cursor[d] = block.offsets[i];
      block.offsets[i + 1] = block.offsets[i] + per_doc[d];
      per_doc[d] = 0;
    }
    block.terms.resize(block.offsets.back());
    // Terms are visited in ascending order, so each mini-doc comes out sorted.
    for (TermId t = block.first_term; t < block.end_term; ++t) {
      for (DocId d : index.postings(t)) block.terms[cursor[d]++] = t;
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::size_t default_block_width(std::size_t vocab_size) {
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(vocab_size))));
  return std::max<std::size_t>(1, k);
}

namespace {
constexpr std::string_view kIndexMagic = "COOCIDX1";
}

void write_index(const InvertedIndex& index, const std::filesystem::path& path) {
  detail::BinaryWriter out(path);
  out.write_magic(kIndexMagic);
  out.write_u32(static_cast<std::uint32_t>(index.vocab_size()));
  for (TermId t = 0; t < index.vocab_size(); ++t) {
    const auto docs = index.postings(t);
    out.write_u32(static_cast<std::uint32_t>(docs.size()));
    out.write_u32s(docs);
  }
  out.close();
}

InvertedIndex read_index(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  in.expect_magic(kIndexMagic);
  const std::uint32_t vocab = in.read_u32();
  InvertedIndex index;
  index.offsets_.reserve(vocab + 1ull);
  index.docs_.reserve((in.file_size() - in.offset()) / sizeof(DocId));
  std::vector<DocId> docs;
  std::size_t doc_bound = 0;
  for (std::uint32_t t = 0; t < vocab; ++t) {
    const auto record_start = in.offset();
    const std::uint32_t df = in.read_u32();
    if (df > (in.file_size() - in.offset()) / sizeof(DocId)) {
      in.fail_at(record_start, fmt::format("truncated postings for term {}", t));
    }
    in.read_u32s(docs, df);
    for (std::size_t i = 1; i < docs.size(); ++i) {
      if (docs[i - 1] >= docs[i]) {
        in.fail_at(record_start + 4 + 4 * i,
                   fmt::format("postings of term {} not strictly ascending", t));
      }
    }
    if (!docs.empty()) doc_bound = std::max<std::size_t>(doc_bound, docs.back() + 1ull);
    index.docs_.insert(index.docs_.end(), docs.begin(), docs.end());
    index.offsets_.push_back(index.docs_.size());
  }
  if (!in.at_end()) in.fail("trailing bytes after last postings list");
  index.doc_count_ = doc_bound;
  return index;
}

}  // namespace cooc

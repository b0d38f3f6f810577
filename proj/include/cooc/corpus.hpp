#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cooc/types.hpp"

namespace cooc {

/// Splits UTF-8 text into maximal runs of Unicode alphanumerics and case-folds
/// each run. Invalid byte sequences decode to U+FFFD and therefore separate tokens.
std::vector<std::string> tokenize(std::string_view text);

struct RawDocument {
  std::string external_id;
  std::string text;
};

/// Bidirectional term-string <-> TermId map with dense ids.
class TermDictionary {
 public:
  /// Returns the id of `term`, assigning the next free id if it is new.
  TermId assign(std::string_view term);
  std::optional<TermId> find(std::string_view term) const;
  /// Throws RangeError for unassigned ids.
  const std::string& lookup(TermId id) const;

  std::size_t size() const noexcept { return terms_.size(); }
  TermId next_id() const noexcept { return static_cast<TermId>(terms_.size()); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }

  friend bool operator==(const TermDictionary& a, const TermDictionary& b) {
    return a.terms_ == b.terms_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, TermId, Hash, std::equal_to<>> ids_;
  std::vector<std::string> terms_;
};

/// Preprocessed documents: each document is its strictly ascending set of
/// TermIds. Stored as one flat term array plus per-document offsets.
class ForwardCollection {
 public:
  ForwardCollection() = default;

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  bool empty() const noexcept { return size() == 0; }
  std::span<const TermId> doc(DocId id) const {
    return {terms_.data() + offsets_[id], terms_.data() + offsets_[id + 1]};
  }
  /// Total number of (document, term) incidences.
  std::size_t postings() const noexcept { return terms_.size(); }
  /// One past the largest TermId in use, 0 for a collection without terms.
  std::size_t term_bound() const noexcept { return term_bound_; }

  /// Appends a document. Throws ContractError unless `terms` is strictly ascending.
  void append(std::span<const TermId> terms);
  void reserve(std::size_t docs, std::size_t postings);

  friend bool operator==(const ForwardCollection& a, const ForwardCollection& b) {
    return a.offsets_ == b.offsets_ && a.terms_ == b.terms_;
  }

 private:
  std::vector<std::uint64_t> offsets_{0};
  std::vector<TermId> terms_;
  std::size_t term_bound_ = 0;
};

/// Streaming ingestion: tokenizes, assigns ids, sorts and deduplicates.
class Ingestor {
 public:
  explicit Ingestor(TermDictionary& dict) : dict_(dict) {}

  /// Throws IngestError on an empty or repeated external id.
  DocId add(const RawDocument& doc);

  const ForwardCollection& collection() const noexcept { return collection_; }
  ForwardCollection release() { return std::move(collection_); }

 private:
  TermDictionary& dict_;
  ForwardCollection collection_;
  std::unordered_set<std::string> seen_ids_;
  std::vector<TermId> scratch_;
};

ForwardCollection ingest(std::span<const RawDocument> docs, TermDictionary& dict);

/// Feeds documents from `input` to `sink` in a deterministic order.
///
/// A directory yields one document per regular file (recursively, sorted by
/// path; the relative path is the external id). A `.jsonl` file yields one
/// document per line from its "id" and "text" fields. Any other file yields
/// one document per non-empty line; text before the first tab is the id,
/// otherwise the id is `line:<n>`. Stops after `limit` documents if given.
void read_raw_documents(const std::filesystem::path& input,
                        const std::function<void(const RawDocument&)>& sink,
                        std::optional<std::size_t> limit = std::nullopt);

void write_forward(const ForwardCollection& collection, const std::filesystem::path& path);
/// Reads at most `limit` documents when given, which is how prefixes are
/// loaded without materializing the whole collection.
ForwardCollection read_forward(const std::filesystem::path& path,
                               std::optional<std::size_t> limit = std::nullopt);

void write_dictionary(const TermDictionary& dict, const std::filesystem::path& path);
TermDictionary read_dictionary(const std::filesystem::path& path);

/// `<prefix>.fwd` and `<prefix>.dict`.
std::filesystem::path forward_path(const std::filesystem::path& prefix);
std::filesystem::path dictionary_path(const std::filesystem::path& prefix);

/// The first `n` documents; throws RangeError when `n` exceeds the size.
ForwardCollection take_prefix(const ForwardCollection& collection, std::size_t n);

}  // namespace cooc

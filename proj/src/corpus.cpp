#include "cooc/corpus.hpp"

#include <clocale>
#include <cwctype>
#include <locale.h>

#include <algorithm>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "cooc/error.hpp"

namespace cooc {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at s[i], advancing i. Ill-formed input
// yields U+FFFD and consumes the maximal invalid subpart.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  unsigned char lo = 0x80, hi = 0xBF;
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    len = 2;
    cp = b0 & 0x1F;
  } else if (b0 >= 0xE0 && b0 <= 0xEF) {
    len = 3;
    cp = b0 & 0x0F;
    if (b0 == 0xE0) lo = 0xA0;
    if (b0 == 0xED) hi = 0x9F;
  } else if (b0 >= 0xF0 && b0 <= 0xF4) {
    len = 4;
    cp = b0 & 0x07;
    if (b0 == 0xF0) lo = 0x90;
    if (b0 == 0xF4) hi = 0x8F;
  } else {
    ++i;
    return kReplacement;
  }
  ++i;
  for (int k = 1; k < len; ++k) {
    if (i >= s.size()) return kReplacement;
    const auto b = static_cast<unsigned char>(s[i]);
    if (b < lo || b > hi) return kReplacement;
    lo = 0x80;
    hi = 0xBF;
    cp = (cp << 6) | (b & 0x3F);
    ++i;
  }
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

locale_t unicode_ctype() {
  static const locale_t loc = [] {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      if (locale_t l = newlocale(LC_CTYPE_MASK, name, locale_t{})) return l;
    }
    return locale_t{};
  }();
  if (!loc) throw Error("no UTF-8 ctype locale available for tokenization");
  return loc;
}

bool is_alnum(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  if (cp == kReplacement) return false;
  return iswalnum_l(static_cast<wint_t>(cp), unicode_ctype()) != 0;
}

// Simple case folding: lowercase mapping plus the code points whose folding
// differs from their lowercase form.
char32_t fold_case(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  switch (cp) {
    case 0x00B5: return 0x03BC;  // micro sign
    case 0x017F: return 0x0073;  // long s
    case 0x0345: return 0x03B9;
    case 0x03C2: return 0x03C3;  // final sigma
    case 0x03D0: return 0x03B2;
    case 0x03D1: return 0x03B8;
    case 0x03D5: return 0x03C6;
    case 0x03D6: return 0x03C0;
    case 0x03F0: return 0x03BA;
    case 0x03F1: return 0x03C1;
    case 0x03F5: return 0x03B5;
    case 0x1E9B: return 0x1E61;
    case 0x1E9E: return 0x00DF;  // capital sharp s
    case 0x1FBE: return 0x03B9;
    default: break;
  }
  // Cherokee folds to the uppercase block.
  if (cp >= 0x13F8 && cp <= 0x13FD) return cp - 8;
  if (cp >= 0xAB70 && cp <= 0xABBF) return cp - 0xAB70 + 0x13A0;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), unicode_ctype()));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = decode_utf8(text, i);
    if (is_alnum(cp)) {
      encode_utf8(fold_case(cp), current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TermId TermDictionary::assign(std::string_view term) {
  if (auto it = ids_.find(term); it != ids_.end()) return it->second;
  if (terms_.size() > std::numeric_limits<TermId>::max()) {
    throw RangeError("term id space exhausted");
  }
  const auto id = static_cast<TermId>(terms_.size());
  terms_.emplace_back(term);
  ids_.emplace(terms_.back(), id);
  return id;
}

std::optional<TermId> TermDictionary::find(std::string_view term) const {
  if (auto it = ids_.find(term); it != ids_.end()) return it->second;
  return std::nullopt;
}

const std::string& TermDictionary::lookup(TermId id) const {
  if (id >= terms_.size()) {
    throw RangeError(fmt::format("term id {} not in dictionary of {} terms", id, terms_.size()));
  }
  return terms_[id];
}

void ForwardCollection::append(std::span<const TermId> terms) {
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i - 1] >= terms[i]) {
      throw ContractError(fmt::format("document {} terms not strictly ascending at position {}",
                                      size(), i));
    }
  }
  if (size() >= std::numeric_limits<DocId>::max()) throw RangeError("doc id space exhausted");
  terms_.insert(terms_.end(), terms.begin(), terms.end());
  offsets_.push_back(terms_.size());
  if (!terms.empty()) term_bound_ = std::max<std::size_t>(term_bound_, terms.back() + 1ull);
}

void ForwardCollection::reserve(std::size_t docs, std::size_t postings) {
  offsets_.reserve(docs + 1);
  terms_.reserve(postings);
}

DocId Ingestor::add(const RawDocument& doc) {
  if (doc.external_id.empty()) throw IngestError("document with empty external id");
  if (!seen_ids_.insert(doc.external_id).second) {
    throw IngestError(fmt::format("duplicate external id '{}'", doc.external_id));
  }
  scratch_.clear();
  for (const auto& token : tokenize(doc.text)) scratch_.push_back(dict_.assign(token));
  std::sort(scratch_.begin(), scratch_.end());
  scratch_.erase(std::unique(scratch_.begin(), scratch_.end()), scratch_.end());
  const auto id = static_cast<DocId>(collection_.size());
  collection_.append(scratch_);
  return id;
}

ForwardCollection ingest(std::span<const RawDocument> docs, TermDictionary& dict) {
  Ingestor ingestor(dict);
  for (const auto& d : docs) ingestor.add(d);
  return ingestor.release();
}

void read_raw_documents(const std::filesystem::path& input,
                        const std::function<void(const RawDocument&)>& sink,
                        std::optional<std::size_t> limit) {
  namespace fs = std::filesystem;
  std::size_t emitted = 0;
  auto done = [&] { return limit && emitted >= *limit; };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open {}", p.string()));
    return std::string(std::istreambuf_iterator<char>(in), {});
  };

  if (fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(input)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      if (done()) return;
      sink(RawDocument{fs::relative(f, input).generic_string(), slurp(f)});
      ++emitted;
    }
    return;
  }

  std::ifstream in(input, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", input.string()));
  const bool jsonl = input.extension() == ".jsonl";
  std::string line;
  std::size_t line_no = 0;
  while (!done() && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    RawDocument doc;
    if (jsonl) {
      try {
        const auto j = nlohmann::json::parse(line);
        doc.external_id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                                 : j.at("id").dump();
        doc.text = j.at("text").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw IngestError(fmt::format("{}:{}: {}", input.string(), line_no, e.what()));
      }
    } else if (auto tab = line.find('\t'); tab != std::string::npos) {
      doc.external_id = line.substr(0, tab);
      doc.text = line.substr(tab + 1);
    } else {
      doc.external_id = fmt::format("line:{}", line_no);
      doc.text = std::move(line);
    }
    sink(doc);
    ++emitted;
  }
}

namespace {
constexpr std::string_view kForwardMagic = "COOCFWD1";
constexpr std::string_view kDictMagic = "COOCDICT";
}  // namespace

void write_forward(const ForwardCollection& collection, const std::filesystem::path& path) {
  detail::BinaryWriter out(path);
  out.write_magic(kForwardMagic);
  out.write_u32(static_cast<std::uint32_t>(collection.size()));
  for (DocId d = 0; d < collection.size(); ++d) {
    const auto terms = collection.doc(d);
    out.write_u32(static_cast<std::uint32_t>(terms.size()));
    out.write_u32s(terms);
  }
  out.close();
}

ForwardCollection read_forward(const std::filesystem::path& path,
                               std::optional<std::size_t> limit) {
  detail::BinaryReader in(path);
  in.expect_magic(kForwardMagic);
  const std::uint32_t doc_count = in.read_u32();
  const std::size_t wanted = limit ? std::min<std::size_t>(*limit, doc_count) : doc_count;
  ForwardCollection collection;
  // A prefix read cannot size its postings up front; only reserve for whole files.
  if (wanted == doc_count) {
    collection.reserve(wanted, (in.file_size() - in.offset()) / sizeof(TermId));
  }
  std::vector<TermId> terms;
  for (std::size_t d = 0; d < wanted; ++d) {
    const auto record_start = in.offset();
    const std::uint32_t n = in.read_u32();
    if (n > (in.file_size() - in.offset()) / sizeof(TermId)) {
      in.fail_at(record_start, fmt::format("truncated document {}", d));
    }
    in.read_u32s(terms, n);
    for (std::size_t i = 1; i < n; ++i) {
      if (terms[i - 1] >= terms[i]) {
        in.fail_at(record_start + 4 + 4 * i,
                   fmt::format("document {} terms not strictly ascending", d));
      }
    }
    collection.append(terms);
  }
  if (wanted == doc_count && !in.at_end()) in.fail("trailing bytes after last document");
  return collection;
}

void write_dictionary(const TermDictionary& dict, const std::filesystem::path& path) {
  detail::BinaryWriter out(path);
  out.write_magic(kDictMagic);
  out.write_u32(static_cast<std::uint32_t>(dict.size()));
  for (const auto& term : dict.terms()) {
    out.write_u32(static_cast<std::uint32_t>(term.size()));
    out.write_bytes(term.data(), term.size());
  }
  out.close();
}

TermDictionary read_dictionary(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  in.expect_magic(kDictMagic);
  const std::uint32_t n = in.read_u32();
  TermDictionary dict;
  std::string term;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto record_start = in.offset();
    const std::uint32_t len = in.read_u32();
    if (len > in.file_size() - in.offset()) in.fail_at(record_start, "truncated entry");
    term.resize(len);
    in.read_bytes(term.data(), len);
    if (dict.assign(term) != i) in.fail_at(record_start, fmt::format("duplicate entry '{}'", term));
  }
  if (!in.at_end()) in.fail("trailing bytes after last entry");
  return dict;
}

std::filesystem::path forward_path(const std::filesystem::path& prefix) {
  return std::filesystem::path(prefix.string() + ".fwd");
}

std::filesystem::path dictionary_path(const std::filesystem::path& prefix) {
  return std::filesystem::path(prefix.string() + ".dict");
}

ForwardCollection take_prefix(const ForwardCollection& collection, std::size_t n) {
  if (n > collection.size()) {
    throw RangeError(fmt::format("prefix of {} documents requested from a collection of {}", n,
                                 collection.size()));
  }
  ForwardCollection out;
  for (DocId d = 0; d < n; ++d) out.append(collection.doc(d));
  return out;
}

}  // namespace cooc

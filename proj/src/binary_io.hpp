#pragma once

// Little-endian file primitives shared by the on-disk formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "cooc/error.hpp"

namespace cooc::detail {

static_assert(std::endian::native == std::endian::little,
              "on-disk formats are written with native little-endian stores");

inline constexpr std::size_t kMagicSize = 8;

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path);

  void write_magic(std::string_view magic) { write_bytes(magic.data(), kMagicSize); }
  void write_u32(std::uint32_t v) { write_bytes(&v, sizeof v); }
  void write_u64(std::uint64_t v) { write_bytes(&v, sizeof v); }
  void write_u32s(std::span<const std::uint32_t> v) {
    write_bytes(v.data(), v.size_bytes());
  }
  void write_bytes(const void* data, std::size_t n);

  std::uint64_t offset() const noexcept { return offset_; }
  /// Overwrites a u64 at an earlier offset, then restores the write position.
  void patch_u64(std::uint64_t at, std::uint64_t v);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::unique_ptr<char[]> buffer_;
  std::uint64_t offset_ = 0;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);

  void expect_magic(std::string_view magic);
  std::uint32_t read_u32() {
    std::uint32_t v;
    read_bytes(&v, sizeof v);
    return v;
  }
  std::uint64_t read_u64() {
    std::uint64_t v;
    read_bytes(&v, sizeof v);
    return v;
  }
  void read_u32s(std::vector<std::uint32_t>& out, std::size_t n) {
    out.resize(n);
    read_bytes(out.data(), n * sizeof(std::uint32_t));
  }
  void read_bytes(void* data, std::size_t n);
  void seek(std::uint64_t offset);

  bool at_end();
  std::uint64_t offset() const noexcept { return offset_; }
  std::uint64_t file_size() const noexcept { return size_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  [[noreturn]] void fail(const std::string& what) const { fail_at(offset_, what); }
  [[noreturn]] void fail_at(std::uint64_t at, const std::string& what) const {
    throw FormatError(path_, at, what);
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::unique_ptr<char[]> buffer_;
  std::uint64_t offset_ = 0;
  std::uint64_t size_ = 0;
};

}  // namespace cooc::detail

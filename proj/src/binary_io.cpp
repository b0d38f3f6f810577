#include "binary_io.hpp"

#include <fmt/format.h>

namespace cooc {

FormatError::FormatError(const std::filesystem::path& path, std::uint64_t offset,
                         const std::string& what)
    : Error(fmt::format("{}: {} at byte offset {}", path.string(), what, offset)),
      path_(path),
      offset_(offset) {}

namespace detail {

namespace {
constexpr std::size_t kBufferSize = 1 << 20;
}

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : path_(path), buffer_(new char[kBufferSize]) {
  out_.rdbuf()->pubsetbuf(buffer_.get(), kBufferSize);
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError(fmt::format("cannot open {} for writing", path.string()));
}

void BinaryWriter::write_bytes(const void* data, std::size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out_) throw IoError(fmt::format("write failed on {}", path_.string()));
  offset_ += n;
}

void BinaryWriter::patch_u64(std::uint64_t at, std::uint64_t v) {
  out_.seekp(static_cast<std::streamoff>(at));
  out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  out_.seekp(static_cast<std::streamoff>(offset_));
  if (!out_) throw IoError(fmt::format("write failed on {}", path_.string()));
}

void BinaryWriter::close() {
  out_.close();
  if (!out_) throw IoError(fmt::format("closing {} failed", path_.string()));
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : path_(path), buffer_(new char[kBufferSize]) {
  in_.rdbuf()->pubsetbuf(buffer_.get(), kBufferSize);
  in_.open(path, std::ios::binary);
  if (!in_) throw IoError(fmt::format("cannot open {}", path.string()));
  std::error_code ec;
  size_ = std::filesystem::file_size(path, ec);
  if (ec) throw IoError(fmt::format("cannot stat {}: {}", path.string(), ec.message()));
}

void BinaryReader::expect_magic(std::string_view magic) {
  char got[kMagicSize];
  if (size_ - offset_ < kMagicSize) fail("file too short for magic");
  read_bytes(got, kMagicSize);
  if (std::string_view(got, kMagicSize) != magic) {
    fail_at(offset_ - kMagicSize, fmt::format("bad magic, expected {}", magic));
  }
}

void BinaryReader::read_bytes(void* data, std::size_t n) {
  if (n > size_ - offset_) fail("truncated record");
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (!in_) fail("read failed");
  offset_ += n;
}

void BinaryReader::seek(std::uint64_t offset) {
  if (offset > size_) fail_at(offset, "seek past end of file");
  in_.seekg(static_cast<std::streamoff>(offset));
  offset_ = offset;
}

bool BinaryReader::at_end() { return offset_ == size_; }

}  // namespace detail
}  // namespace cooc

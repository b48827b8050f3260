#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slca::detail {

/// Little-endian byte sink, independent of host byte order.
class ByteWriter {
 public:
  void magic(std::string_view tag);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  /// Narrowing write of 64-bit values to 32-bit floats.
  void f32_array(std::span<const double> values);

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  /// Throws BadFormat if the next bytes differ from tag.
  void expect_magic(std::string_view tag);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  void f32_array(std::span<double> out);

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  /// Throws BadFormat when fewer than n bytes remain.
  void require(std::size_t n) const;
  /// Throws BadFormat unless every byte has been consumed.
  void expect_end() const;

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::string what_;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace slca::detail

#include "binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "slca/errors.hpp"

namespace slca::detail {

void ByteWriter::magic(std::string_view tag) {
  for (char c : tag) bytes_.push_back(static_cast<std::uint8_t>(c));
}

void ByteWriter::u8(std::uint8_t v) { bytes_.push_back(v); }

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::f32_array(std::span<const double> values) {
  bytes_.reserve(bytes_.size() + 4 * values.size());
  for (double v : values) f32(static_cast<float>(v));
}

void ByteReader::require(std::size_t n) const {
  if (remaining() < n) throw BadFormat(what_ + ": truncated file");
}

void ByteReader::expect_magic(std::string_view tag) {
  require(tag.size());
  for (char c : tag) {
    if (bytes_[pos_++] != static_cast<std::uint8_t>(c)) {
      throw BadFormat(what_ + ": bad magic, expected \"" + std::string(tag) + "\"");
    }
  }
}

std::uint8_t ByteReader::u8() {
  require(1);
  return bytes_[pos_++];
}

std::uint32_t ByteReader::u32() {
  require(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t ByteReader::u64() {
  require(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

void ByteReader::f32_array(std::span<double> out) {
  require(4 * out.size());
  for (double& v : out) v = static_cast<double>(f32());
}

void ByteReader::expect_end() const {
  if (remaining() != 0) {
    throw BadFormat(what_ + ": " + std::to_string(remaining()) + " trailing bytes");
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

}  // namespace slca::detail

#include "oadino/util/binary_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "oadino/error.hpp"

namespace oadino::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto raw = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
    std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
  }
  return v;
}

template <typename T>
void append(Bytes& out, T v) {
  v = to_little(v);
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

}  // namespace

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ByteWriter::magic(std::string_view four_cc) {
  bytes_.insert(bytes_.end(), four_cc.begin(), four_cc.end());
}
void ByteWriter::u32(std::uint32_t v) { append(bytes_, v); }
void ByteWriter::u64(std::uint64_t v) { append(bytes_, v); }
void ByteWriter::f32(float v) { append(bytes_, std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { append(bytes_, std::bit_cast<std::uint64_t>(v)); }
void ByteWriter::raw(std::span<const std::uint8_t> data) {
  bytes_.insert(bytes_.end(), data.begin(), data.end());
}

void ByteReader::fail(const std::string& message) const {
  throw FormatError(what_ + ": " + message + " at byte offset " + std::to_string(offset_));
}

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) {
    fail("truncated, need " + std::to_string(n) + " bytes but " + std::to_string(remaining()) +
         " remain");
  }
}

void ByteReader::expect_magic(std::string_view four_cc) {
  need(four_cc.size());
  if (std::memcmp(data_.data() + offset_, four_cc.data(), four_cc.size()) != 0) {
    fail("bad magic, expected \"" + std::string(four_cc) + "\"");
  }
  offset_ += four_cc.size();
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[offset_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v;
  std::memcpy(&v, data_.data() + offset_, 4);
  offset_ += 4;
  return to_little(v);
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v;
  std::memcpy(&v, data_.data() + offset_, 8);
  offset_ += 8;
  return to_little(v);
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }
double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
  need(n);
  auto out = data_.subspan(offset_, n);
  offset_ += n;
  return out;
}

}  // namespace oadino::io

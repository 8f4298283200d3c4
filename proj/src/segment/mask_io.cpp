#include "oadino/error.hpp"
#include "oadino/segment/segmenter.hpp"
#include "oadino/util/binary_io.hpp"

namespace oadino {

namespace {
constexpr std::uint32_t kMaskVersion = 1;
}

std::vector<std::uint8_t> encode_mask(const ForegroundMask& mask) {
  if (mask.grid_h == 0 || mask.grid_w == 0 || mask.bits.size() != mask.patch_count()) {
    throw ArgumentError("mask " + mask.image_id + " is inconsistent with its grid");
  }
  io::ByteWriter w;
  w.magic("OAMK");
  w.u32(kMaskVersion);
  w.u32(mask.grid_h);
  w.u32(mask.grid_w);
  w.u32(static_cast<std::uint32_t>(mask.pass));
  const std::size_t row_bytes = (mask.grid_w + 7) / 8;
  for (std::size_t r = 0; r < mask.grid_h; ++r) {
    std::vector<std::uint8_t> row(row_bytes, 0);
    for (std::size_t c = 0; c < mask.grid_w; ++c) {
      if (mask.bits[r * mask.grid_w + c]) row[c / 8] |= static_cast<std::uint8_t>(1u << (c % 8));
    }
    w.raw(row);
  }
  return w.take();
}

ForegroundMask decode_mask(std::span<const std::uint8_t> bytes, std::string image_id) {
  io::ByteReader r(bytes, "OAMK");
  r.expect_magic("OAMK");
  const auto version = r.u32();
  if (version != kMaskVersion) r.fail("unsupported version " + std::to_string(version));
  ForegroundMask mask;
  mask.image_id = std::move(image_id);
  mask.grid_h = r.u32();
  mask.grid_w = r.u32();
  const auto pass = r.u32();
  if (pass > 1) r.fail("unknown mask pass " + std::to_string(pass));
  mask.pass = static_cast<MaskPass>(pass);
  if (mask.grid_h == 0 || mask.grid_w == 0) r.fail("zero grid dimension");
  const std::size_t row_bytes = (mask.grid_w + 7) / 8;
  if (r.remaining() != row_bytes * mask.grid_h) r.fail("payload size mismatch");
  mask.bits.resize(mask.patch_count());
  for (std::size_t row = 0; row < mask.grid_h; ++row) {
    const auto packed = r.take(row_bytes);
    for (std::size_t c = 0; c < mask.grid_w; ++c) {
      const bool bit = (packed[c / 8] >> (c % 8)) & 1u;
      mask.bits[row * mask.grid_w + c] = bit ? 1 : 0;
    }
    // Padding bits past grid_w must be clear so encoding is canonical.
    if (mask.grid_w % 8 != 0 && (packed[row_bytes - 1] >> (mask.grid_w % 8)) != 0) {
      r.fail("nonzero padding bits");
    }
  }
  return mask;
}

void write_mask(const ForegroundMask& mask, const std::filesystem::path& path) {
  io::write_file(path, encode_mask(mask));
}

ForegroundMask read_mask(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return decode_mask(bytes, path.stem().string());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace oadino

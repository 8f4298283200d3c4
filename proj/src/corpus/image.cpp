#include "oadino/corpus/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "oadino/error.hpp"
#include "oadino/util/binary_io.hpp"

namespace oadino {

void Image::validate() const {
  if (width == 0 || height == 0) throw ArgumentError("image " + id + " has zero extent");
  if (pixels.size() != width * height * kChannels) {
    throw ArgumentError("image " + id + " pixel count does not match " + std::to_string(width) +
                        "x" + std::to_string(height) + "x3");
  }
  for (float v : pixels) {
    if (!(v >= 0.0f && v <= 1.0f)) throw ArgumentError("image " + id + " has a value outside [0,1]");
  }
}

namespace {

class HeaderParser {
 public:
  explicit HeaderParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError("PPM: " + message + " at byte offset " + std::to_string(pos_));
  }

  void skip_whitespace_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(ch)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number() {
    skip_whitespace_and_comments();
    if (pos_ >= bytes_.size()) fail("truncated header");
    if (!std::isdigit(bytes_[pos_])) fail("expected a decimal number");
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (std::size_t{1} << 31)) fail("header value too large");
      ++pos_;
    }
    return value;
  }

  std::size_t pos_ = 0;
  std::span<const std::uint8_t> bytes_;
};

}  // namespace

Image decode_ppm(std::span<const std::uint8_t> bytes, std::string id) {
  HeaderParser p(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') p.fail("magic is not P6");
  p.pos_ = 2;
  const std::size_t width = p.number();
  const std::size_t height = p.number();
  const std::size_t maxval = p.number();
  if (width == 0 || height == 0) p.fail("zero image dimension");
  if (maxval != 255) p.fail("maxval " + std::to_string(maxval) + " unsupported, need 255");
  if (p.pos_ >= bytes.size() || !std::isspace(bytes[p.pos_])) p.fail("missing whitespace after maxval");
  ++p.pos_;

  const std::size_t need = width * height * Image::kChannels;
  if (bytes.size() - p.pos_ < need) {
    p.fail("truncated payload, need " + std::to_string(need) + " bytes but " +
           std::to_string(bytes.size() - p.pos_) + " remain");
  }
  Image image(std::move(id), width, height);
  for (std::size_t i = 0; i < need; ++i) {
    image.pixels[i] = static_cast<float>(bytes[p.pos_ + i]) / 255.0f;
  }
  return image;
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
  image.validate();
  const std::string header =
      "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.pixels.size());
  for (float v : image.pixels) {
    // nearbyint honours the default round-to-nearest-even mode.
    const double scaled = std::nearbyint(static_cast<double>(v) * 255.0);
    out.push_back(static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0)));
  }
  return out;
}

Image read_ppm(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return decode_ppm(bytes, path.stem().string());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  io::write_file(path, encode_ppm(image));
}

Image crop(const Image& image, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) {
  if (w == 0 || h == 0) throw ArgumentError("empty crop");
  if (x0 + w > image.width || y0 + h > image.height) throw ArgumentError("crop outside image");
  Image out(image.id, w, h);
  for (std::size_t y = 0; y < h; ++y) {
    const float* src = &image.pixels[image.index(y0 + y, x0, 0)];
    std::copy(src, src + w * Image::kChannels, &out.pixels[out.index(y, 0, 0)]);
  }
  return out;
}

namespace {

struct Tap {
  std::size_t lo, hi;
  float frac;
};

std::vector<Tap> taps(std::size_t in, std::size_t out) {
  std::vector<Tap> result(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    const std::size_t hi = std::min(lo + 1, in - 1);
    result[i] = {lo, hi, static_cast<float>(src - static_cast<double>(lo))};
  }
  return result;
}

}  // namespace

Image resize_bilinear(const Image& source, std::size_t out_width, std::size_t out_height) {
  if (source.width == 0 || source.height == 0) throw ArgumentError("cannot resize an empty image");
  if (out_width == 0 || out_height == 0) throw ArgumentError("resize target must be non-empty");
  const auto xs = taps(source.width, out_width);
  const auto ys = taps(source.height, out_height);
  Image out(source.id, out_width, out_height);
  for (std::size_t y = 0; y < out_height; ++y) {
    const auto& ty = ys[y];
    for (std::size_t x = 0; x < out_width; ++x) {
      const auto& tx = xs[x];
      for (std::size_t c = 0; c < Image::kChannels; ++c) {
        const float top = source.at(ty.lo, tx.lo, c) +
                          tx.frac * (source.at(ty.lo, tx.hi, c) - source.at(ty.lo, tx.lo, c));
        const float bottom = source.at(ty.hi, tx.lo, c) +
                             tx.frac * (source.at(ty.hi, tx.hi, c) - source.at(ty.hi, tx.lo, c));
        out.at(y, x, c) = std::clamp(top + ty.frac * (bottom - top), 0.0f, 1.0f);
      }
    }
  }
  return out;
}

void ObjectPatch::validate() const {
  if (pixels.size() != kValues) throw ArgumentError("object patch must be 64x64x3");
  for (float v : pixels) {
    if (!(v >= 0.0f && v <= 1.0f)) throw ArgumentError("object patch value outside [0,1]");
  }
}

ObjectPatch make_object_patch(const Image& crop_image, std::size_t patch_index) {
  if (crop_image.width == 0 || crop_image.height == 0) throw ArgumentError("empty crop");
  Image resized = resize_bilinear(crop_image, ObjectPatch::kSide, ObjectPatch::kSide);
  return ObjectPatch{crop_image.id, patch_index, std::move(resized.pixels)};
}

}  // namespace oadino

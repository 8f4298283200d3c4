#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace oadino {

// RGB image with channel values in [0, 1], stored row-major, interleaved.
struct Image {
  static constexpr std::size_t kChannels = 3;

  std::string id;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(std::string image_id, std::size_t w, std::size_t h, float fill = 0.0f)
      : id(std::move(image_id)), width(w), height(h), pixels(w * h * kChannels, fill) {}

  std::size_t index(std::size_t y, std::size_t x, std::size_t c) const {
    return (y * width + x) * kChannels + c;
  }
  float at(std::size_t y, std::size_t x, std::size_t c) const { return pixels[index(y, x, c)]; }
  float& at(std::size_t y, std::size_t x, std::size_t c) { return pixels[index(y, x, c)]; }

  // Throws ArgumentError when the pixel count or range is wrong.
  void validate() const;
};

// Binary PPM (P6, maxval 255). Values decode as byte/255; encoding rounds
// value*255 half-to-even and clamps to [0, 255].
Image decode_ppm(std::span<const std::uint8_t> bytes, std::string id = {});
std::vector<std::uint8_t> encode_ppm(const Image& image);
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const Image& image, const std::filesystem::path& path);

// Sub-rectangle [x0, x0+w) x [y0, y0+h); must lie inside the image.
Image crop(const Image& image, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h);

// Bilinear resampling with half-pixel-centred sampling:
// src = (dst + 0.5) * in/out - 0.5, clamped to the valid pixel range.
Image resize_bilinear(const Image& source, std::size_t out_width, std::size_t out_height);

// A foreground crop resampled to the VAE input resolution.
struct ObjectPatch {
  static constexpr std::size_t kSide = 64;
  static constexpr std::size_t kValues = kSide * kSide * Image::kChannels;

  std::string image_id;
  std::size_t patch_index = 0;  // row-major grid index of the source patch
  std::vector<float> pixels;    // kSide x kSide x 3, row-major

  void validate() const;
};

// Resizes an arbitrary crop to 64x64. Throws ArgumentError for an empty crop.
ObjectPatch make_object_patch(const Image& crop, std::size_t patch_index);

}  // namespace oadino

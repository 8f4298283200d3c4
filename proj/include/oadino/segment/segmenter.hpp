#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oadino/corpus/image.hpp"
#include "oadino/corpus/oadf.hpp"
#include "oadino/segment/pca.hpp"

namespace oadino {

enum class MaskPass : std::uint32_t { First = 0, Refined = 1 };

struct ForegroundMask {
  std::string image_id;
  std::uint32_t grid_h = 0;
  std::uint32_t grid_w = 0;
  std::vector<std::uint8_t> bits;  // one 0/1 byte per patch, row-major
  MaskPass pass = MaskPass::First;

  std::size_t patch_count() const { return std::size_t{grid_h} * grid_w; }
  std::size_t popcount() const;
  bool operator==(const ForegroundMask&) const = default;
};

struct SegmentationResult {
  PcaBasis basis;
  // +1 when the foreground side is the positive direction of basis PC1.
  int orientation = 1;
  std::vector<ForegroundMask> masks;
};

// Midpoint of the two central order statistics for an even count.
double median(std::vector<double> values);

// bit_i = values_i > median(values)
std::vector<std::uint8_t> threshold_above_median(std::span<const double> values);

// Splits [0, n_images) into consecutive batches of t. A trailing batch with
// fewer than 2 images is merged into the previous batch.
std::vector<std::vector<std::size_t>> partition_batches(std::size_t n_images, std::size_t t);

// First pass: PCA over all t*p rows of the batch, projection onto PC1, bit =
// projection > batch median. PC1 is oriented so the mean projection of border
// patches does not exceed that of interior patches (grids without interior
// keep the sign-normalised orientation).
SegmentationResult first_pass_mask(std::span<const PatchEmbeddingSet> batch);

// Second pass: PCA over the masked batch (rows outside the first-pass mask
// zeroed), projection of every original patch onto the new PC1, bit =
// projection > batch median. The orientation is the one whose mask agrees
// with the first pass on more patches. Throws RefinementError when the first
// pass selected fewer than two patches.
SegmentationResult second_pass_refine(std::span<const PatchEmbeddingSet> batch,
                                      const PcaBasis& first_basis,
                                      std::span<const ForegroundMask> first_masks);

// Pixel footprint of the patch grid: s = ceil(extent / grid) with the last
// row/column clipped. Throws ArgumentError when the grid cannot tile the image.
struct PatchGeometry {
  std::size_t patch_h = 0;
  std::size_t patch_w = 0;
  std::size_t grid_h = 0;
  std::size_t grid_w = 0;
};
PatchGeometry patch_geometry(std::size_t image_w, std::size_t image_h, std::size_t grid_h,
                             std::size_t grid_w);

struct Extraction {
  Image masked;                      // background patches zeroed (x^o)
  std::vector<ObjectPatch> patches;  // foreground crops, row-major, 64x64
};

Extraction remap_and_extract(const Image& image, const ForegroundMask& mask);

// Mean RGB over pixels covered by foreground patches; nullopt if none.
std::optional<std::array<double, 3>> mean_foreground_rgb(const Image& image, const ForegroundMask& mask);

// OAMK, little-endian:
//   "OAMK" | u32 version=1 | u32 grid_h | u32 grid_w | u32 pass |
//   grid_h rows of ceil(grid_w/8) bytes, bit j of a row at byte j/8, bit j%8 (LSB first).
std::vector<std::uint8_t> encode_mask(const ForegroundMask& mask);
ForegroundMask decode_mask(std::span<const std::uint8_t> bytes, std::string image_id = {});
void write_mask(const ForegroundMask& mask, const std::filesystem::path& path);
ForegroundMask read_mask(const std::filesystem::path& path);

// White foreground, black background, each patch drawn as cell x cell pixels.
Image mask_visualization(const ForegroundMask& mask, std::size_t cell = 8);

}  // namespace oadino

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace oadino {

// OADF container, little-endian:
//   "OADF" | u32 version=1 | u32 grid_h | u32 grid_w | u32 dim |
//   grid_h*grid_w*dim binary32 values, patch-major then feature index.
// Used for patch embeddings, global features (1x1 grid), extracted patch
// tensors (count x 1 grid) and joint representations (m x 1 grid).
inline constexpr std::uint32_t kOadfVersion = 1;
inline constexpr std::size_t kOadfHeaderBytes = 20;

struct PatchEmbeddingSet {
  std::string image_id;
  std::uint32_t grid_h = 0;
  std::uint32_t grid_w = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;

  std::size_t patch_count() const { return std::size_t{grid_h} * grid_w; }
  std::span<const float> row(std::size_t patch) const {
    return {values.data() + patch * dim, dim};
  }
  std::span<float> row(std::size_t patch) { return {values.data() + patch * dim, dim}; }

  // Throws ArgumentError on empty grid, zero dim, size mismatch or non-finite values.
  void validate() const;
};

struct GlobalFeature {
  std::string image_id;
  std::vector<float> values;

  std::size_t dim() const { return values.size(); }
  // Finite and of nonzero norm.
  void validate() const;
};

std::vector<std::uint8_t> encode_oadf(const PatchEmbeddingSet& set);
PatchEmbeddingSet decode_oadf(std::span<const std::uint8_t> bytes, std::string image_id = {});

// The image id is taken from the file stem when reading.
void write_embeddings(const PatchEmbeddingSet& set, const std::filesystem::path& path);
PatchEmbeddingSet read_embeddings(const std::filesystem::path& path);

void write_global(const GlobalFeature& feature, const std::filesystem::path& path);
GlobalFeature read_global(const std::filesystem::path& path);

}  // namespace oadino

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "oadino/corpus/annotation.hpp"
#include "oadino/corpus/image.hpp"
#include "oadino/corpus/oadf.hpp"
#include "oadino/eval/eval.hpp"
#include "oadino/segment/segmenter.hpp"

namespace oadino::synth {

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n_images = 100;
  std::size_t grid_h = 8;
  std::size_t grid_w = 8;
  std::size_t patch_px = 16;
  std::size_t objects_min = 3;
  std::size_t objects_max = 10;
  std::size_t n_shapes = 3;
  std::size_t n_sizes = 2;
  std::size_t n_materials = 2;
  std::size_t n_colours = 8;
  std::size_t dim = 48;
  double w_shape = 1.0;
  double w_size = 1.0;
  double w_material = 1.0;
  double w_colour = 0.01;
  double background_marker = 4.0;
  double noise = 0.05;
  // Share of grid patches covered by objects in every scene. Half coverage
  // puts the batch median between foreground and background.
  double foreground_fraction = 0.5;

  // Layout of the embedding coordinates.
  std::size_t background_dim() const { return 0; }
  std::size_t shape_offset() const { return 1; }
  std::size_t size_offset() const { return shape_offset() + n_shapes; }
  std::size_t material_offset() const { return size_offset() + n_sizes; }
  std::size_t colour_offset() const { return material_offset() + n_materials; }
  std::size_t used_dims() const { return colour_offset() + n_colours; }
  std::size_t covered_patches() const;

  // Throws ArgumentError for empty vocabularies, negative weights, an
  // embedding too narrow for the one-hot blocks or an object count range the
  // grid cannot hold.
  void validate() const;
};

std::string shape_name(std::size_t i);
std::string size_name(std::size_t i);
std::string material_name(std::size_t i);
std::string colour_name(std::size_t i);
std::array<double, 3> colour_rgb(std::size_t i);

struct PlacedObject {
  std::size_t row = 0, col = 0;  // top-left grid cell
  std::size_t rows = 0, cols = 0;
  std::size_t shape = 0, size = 0, material = 0, colour = 0;
};

struct SynthScene {
  Image image;
  SceneAnnotation annotation;
  ForegroundMask truth;  // pass First, bits = object-occupied patches
  PatchEmbeddingSet embeddings;
  GlobalFeature global_raw;     // mean over all patches, colour block zeroed
  GlobalFeature global_masked;  // mean over object patches, colour block zeroed
  std::vector<int> object_of_patch;  // -1 for background
  std::vector<PlacedObject> objects;
};

std::string scene_id(std::size_t index);

// Scene `index` depends only on (config, index).
SynthScene generate_scene(const SynthConfig& config, std::size_t index);
std::vector<SynthScene> generate(const SynthConfig& config, unsigned threads = 1);

// Exhaustive scan: for each query's reference object, the ids of the
// candidate scenes holding an object equal to it on every attribute of
// `subset`.
std::vector<std::vector<std::string>> brute_force_retrieval_truth(std::span<const SceneAnnotation> queries,
                                                                  std::span<const SceneAnnotation> candidates,
                                                                  const eval::AttributeSubset& subset);

struct SplitSizes {
  std::size_t train = 0;
  std::size_t query = 0;
  std::size_t candidates = 0;
};
// 1/6 train, 1/6 query, rest candidates.
SplitSizes default_splits(std::size_t n_images);

// Writes scenes [0, n_images) under `out` (layout in the README) and the
// three split manifests. Scenes are generated and written one at a time.
void write_corpus(const SynthConfig& config, const SplitSizes& splits, const std::filesystem::path& out,
                  unsigned threads = 1);

}  // namespace oadino::synth

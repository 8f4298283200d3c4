#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "oadino/error.hpp"
#include "oadino/synthetic/synthetic.hpp"
#include "oadino/util/parallel.hpp"
#include "oadino/util/rng.hpp"

namespace oadino::synth {

namespace {

constexpr std::size_t kMaxAttempts = 1000;

std::string pick_name(std::span<const char* const> names, std::string_view prefix, std::size_t i) {
  if (i < names.size()) return names[i];
  return std::string(prefix) + std::to_string(i);
}

struct Block {
  std::size_t rows, cols;
  std::size_t area() const { return rows * cols; }
};

// Size class s covers blocks with sides in [1+s, 2+2s] whose area exceeds
// every block of class s-1, so larger classes are always larger on the grid.
std::vector<Block> size_class_blocks(std::size_t s) {
  std::vector<Block> out;
  const std::size_t lo = 1 + s, hi = 2 + 2 * s;
  const std::size_t floor_area = s == 0 ? 1 : (2 * s) * (2 * s);
  for (std::size_t r = lo; r <= hi; ++r) {
    for (std::size_t c = lo; c <= hi; ++c) {
      if (r * c > floor_area) out.push_back({r, c});
    }
  }
  return out;
}

bool inside_footprint(std::size_t shape, double u, double v) {
  switch (shape % 3) {
    case 0: return std::abs(u) <= 0.85 && std::abs(v) <= 0.85;
    case 1: return u * u + v * v <= 0.7225;
    default: return std::abs(u) + std::abs(v) <= 1.1;
  }
}

}  // namespace

std::string shape_name(std::size_t i) {
  static constexpr const char* kNames[] = {"cube", "sphere", "cylinder"};
  return pick_name(kNames, "shape", i);
}
std::string size_name(std::size_t i) {
  static constexpr const char* kNames[] = {"small", "large"};
  return pick_name(kNames, "size", i);
}
std::string material_name(std::size_t i) {
  static constexpr const char* kNames[] = {"rubber", "metal"};
  return pick_name(kNames, "material", i);
}
std::string colour_name(std::size_t i) {
  static constexpr const char* kNames[] = {"gray", "red", "blue", "green", "brown", "purple", "cyan", "yellow"};
  return pick_name(kNames, "colour", i);
}

std::array<double, 3> colour_rgb(std::size_t i) {
  static constexpr std::array<std::array<int, 3>, 8> kPalette = {{{87, 87, 87},
                                                                   {173, 35, 35},
                                                                   {42, 75, 215},
                                                                   {29, 105, 20},
                                                                   {129, 74, 25},
                                                                   {129, 38, 192},
                                                                   {41, 208, 208},
                                                                   {255, 238, 51}}};
  if (i < kPalette.size()) {
    return {kPalette[i][0] / 255.0, kPalette[i][1] / 255.0, kPalette[i][2] / 255.0};
  }
  // Extra colours walk the hue circle at fixed saturation.
  const double h = std::fmod(static_cast<double>(i) * 0.618033988749895, 1.0) * 6.0;
  const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
  std::array<double, 3> rgb{};
  switch (static_cast<int>(h)) {
    case 0: rgb = {1, x, 0}; break;
    case 1: rgb = {x, 1, 0}; break;
    case 2: rgb = {0, 1, x}; break;
    case 3: rgb = {0, x, 1}; break;
    case 4: rgb = {x, 0, 1}; break;
    default: rgb = {1, 0, x}; break;
  }
  for (auto& c : rgb) c = 0.15 + 0.7 * c;
  return rgb;
}

std::size_t SynthConfig::covered_patches() const {
  return static_cast<std::size_t>(std::llround(foreground_fraction * static_cast<double>(grid_h * grid_w)));
}

void SynthConfig::validate() const {
  if (n_images == 0) throw ArgumentError("n_images must be >= 1");
  if (grid_h == 0 || grid_w == 0 || patch_px == 0) throw ArgumentError("grid and patch size must be positive");
  if (n_shapes == 0 || n_sizes == 0 || n_materials == 0 || n_colours == 0) {
    throw ArgumentError("attribute vocabularies must be nonempty");
  }
  if (objects_min == 0 || objects_max < objects_min) throw ArgumentError("invalid objects_per_image range");
  for (double w : {w_shape, w_size, w_material, w_colour, background_marker, noise}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("weights and noise must be finite and >= 0");
  }
  if (dim < used_dims()) {
    throw ArgumentError("embedding dim " + std::to_string(dim) + " cannot hold " + std::to_string(used_dims()) +
                        " marker and attribute coordinates");
  }
  if (!(foreground_fraction > 0.0 && foreground_fraction < 1.0)) {
    throw ArgumentError("foreground_fraction must lie in (0, 1)");
  }
  const std::size_t largest_side = 2 + 2 * (n_sizes - 1);
  if (largest_side > std::min(grid_h, grid_w)) throw ArgumentError("largest size class does not fit the grid");
  if (objects_min * 2 > covered_patches()) throw ArgumentError("too many objects for the covered area");
}

std::string scene_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06zu", index);
  return buf;
}

SynthScene generate_scene(const SynthConfig& config, std::size_t index) {
  config.validate();
  Rng rng(mix_seed(config.seed, index));
  const std::size_t gh = config.grid_h, gw = config.grid_w, p = gh * gw;
  const std::size_t cover = config.covered_patches();

  std::vector<std::vector<Block>> classes(config.n_sizes);
  for (std::size_t s = 0; s < config.n_sizes; ++s) classes[s] = size_class_blocks(s);

  std::vector<PlacedObject> objects;
  std::vector<int> owner;
  bool placed = false;
  for (std::size_t attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
    const std::size_t n = config.objects_min + rng.below(config.objects_max - config.objects_min + 1);
    objects.assign(n, {});
    std::size_t area = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      auto& o = objects[i];
      o.size = rng.below(config.n_sizes);
      const auto& blocks = classes[o.size];
      const Block b = blocks[rng.below(blocks.size())];
      o.rows = b.rows;
      o.cols = b.cols;
      area += b.area();
    }
    if (area >= cover) continue;
    {
      auto& last = objects.back();
      last.size = rng.below(config.n_sizes);
      std::vector<Block> fit;
      for (const auto& b : classes[last.size]) {
        if (b.area() == cover - area) fit.push_back(b);
      }
      if (fit.empty()) continue;
      const Block b = fit[rng.below(fit.size())];
      last.rows = b.rows;
      last.cols = b.cols;
    }

    // Largest first, each at a uniformly chosen free position.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return objects[a].rows * objects[a].cols > objects[b].rows * objects[b].cols;
    });
    owner.assign(p, -1);
    bool ok = true;
    for (std::size_t idx : order) {
      auto& o = objects[idx];
      std::vector<std::pair<std::size_t, std::size_t>> free;
      for (std::size_t r = 0; r + o.rows <= gh; ++r) {
        for (std::size_t c = 0; c + o.cols <= gw; ++c) {
          bool clear = true;
          for (std::size_t dr = 0; dr < o.rows && clear; ++dr) {
            for (std::size_t dc = 0; dc < o.cols && clear; ++dc) clear = owner[(r + dr) * gw + c + dc] < 0;
          }
          if (clear) free.emplace_back(r, c);
        }
      }
      if (free.empty()) {
        ok = false;
        break;
      }
      const auto [r0, c0] = free[rng.below(free.size())];
      o.row = r0;
      o.col = c0;
      for (std::size_t dr = 0; dr < o.rows; ++dr) {
        for (std::size_t dc = 0; dc < o.cols; ++dc) owner[(r0 + dr) * gw + c0 + dc] = static_cast<int>(idx);
      }
    }
    placed = ok;
  }
  if (!placed) {
    throw GenerationError("scene " + std::to_string(index) + ": no non-overlapping layout after " +
                          std::to_string(kMaxAttempts) + " attempts");
  }
  for (auto& o : objects) {
    o.shape = rng.below(config.n_shapes);
    o.material = rng.below(config.n_materials);
    o.colour = rng.below(config.n_colours);
  }

  SynthScene scene;
  const std::string id = scene_id(index);
  scene.objects = objects;
  scene.object_of_patch = owner;
  scene.annotation.image_id = id;
  for (const auto& o : objects) {
    scene.annotation.objects.push_back(
        {shape_name(o.shape), size_name(o.size), material_name(o.material), colour_name(o.colour)});
  }
  scene.annotation.reference_object_index = rng.below(objects.size());

  scene.truth.image_id = id;
  scene.truth.grid_h = static_cast<std::uint32_t>(gh);
  scene.truth.grid_w = static_cast<std::uint32_t>(gw);
  scene.truth.pass = MaskPass::First;
  scene.truth.bits.resize(p);
  for (std::size_t i = 0; i < p; ++i) scene.truth.bits[i] = owner[i] >= 0 ? 1 : 0;

  // Pixels: low-contrast grey noise, objects as flat colour footprints with
  // material dithering.
  const std::size_t px = config.patch_px;
  scene.image = Image(id, gw * px, gh * px);
  auto& img = scene.image;
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < Image::kChannels; ++c) img.at(y, x, c) = static_cast<float>(rng.uniform(0.78, 0.82));
    }
  }
  for (const auto& o : objects) {
    const auto rgb = colour_rgb(o.colour);
    const double x0 = static_cast<double>(o.col * px), y0 = static_cast<double>(o.row * px);
    const double w = static_cast<double>(o.cols * px), h = static_cast<double>(o.rows * px);
    for (std::size_t y = o.row * px; y < (o.row + o.rows) * px; ++y) {
      for (std::size_t x = o.col * px; x < (o.col + o.cols) * px; ++x) {
        const double u = (static_cast<double>(x) + 0.5 - x0) / w * 2.0 - 1.0;
        const double v = (static_cast<double>(y) + 0.5 - y0) / h * 2.0 - 1.0;
        if (!inside_footprint(o.shape, u, v)) continue;
        const bool shade = o.material > 0 && (x + y) % (o.material + 1) == 0;
        for (std::size_t c = 0; c < Image::kChannels; ++c) {
          img.at(y, x, c) = static_cast<float>(shade ? rgb[c] * 0.6 : rgb[c]);
        }
      }
    }
  }

  // Patch embeddings: Gaussian noise plus the background marker or the
  // weighted attribute one-hots.
  auto& emb = scene.embeddings;
  emb.image_id = id;
  emb.grid_h = static_cast<std::uint32_t>(gh);
  emb.grid_w = static_cast<std::uint32_t>(gw);
  emb.dim = static_cast<std::uint32_t>(config.dim);
  emb.values.resize(p * config.dim);
  for (std::size_t i = 0; i < p; ++i) {
    auto row = emb.row(i);
    for (std::size_t d = 0; d < config.dim; ++d) row[d] = static_cast<float>(config.noise * rng.normal());
    if (owner[i] < 0) {
      row[config.background_dim()] += static_cast<float>(config.background_marker);
    } else {
      const auto& o = objects[static_cast<std::size_t>(owner[i])];
      row[config.shape_offset() + o.shape] += static_cast<float>(config.w_shape);
      row[config.size_offset() + o.size] += static_cast<float>(config.w_size);
      row[config.material_offset() + o.material] += static_cast<float>(config.w_material);
      row[config.colour_offset() + o.colour] += static_cast<float>(config.w_colour);
    }
  }

  auto mean_global = [&](bool objects_only) {
    GlobalFeature g{id, std::vector<float>(config.dim, 0.0f)};
    std::vector<double> acc(config.dim, 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < p; ++i) {
      if (objects_only && owner[i] < 0) continue;
      const auto row = emb.row(i);
      for (std::size_t d = 0; d < config.dim; ++d) acc[d] += row[d];
      ++n;
    }
    for (std::size_t d = 0; d < config.dim; ++d) g.values[d] = static_cast<float>(acc[d] / static_cast<double>(n));
    for (std::size_t d = 0; d < config.n_colours; ++d) g.values[config.colour_offset() + d] = 0.0f;
    return g;
  };
  scene.global_raw = mean_global(false);
  scene.global_masked = mean_global(true);
  return scene;
}

std::vector<SynthScene> generate(const SynthConfig& config, unsigned threads) {
  config.validate();
  std::vector<SynthScene> scenes(config.n_images);
  parallel_for(config.n_images, threads, [&](std::size_t i) { scenes[i] = generate_scene(config, i); });
  return scenes;
}

std::vector<std::vector<std::string>> brute_force_retrieval_truth(std::span<const SceneAnnotation> queries,
                                                                  std::span<const SceneAnnotation> candidates,
                                                                  const eval::AttributeSubset& subset) {
  std::vector<std::vector<std::string>> out;
  for (const auto& q : queries) {
    const auto& ref = q.objects.at(q.reference_object_index.value());
    std::vector<std::string> valid;
    for (const auto& c : candidates) {
      for (const auto& o : c.objects) {
        bool same = true;
        for (auto a : subset) {
          switch (a) {
            case Attribute::Shape: same = same && o.shape == ref.shape; break;
            case Attribute::Size: same = same && o.size == ref.size; break;
            case Attribute::Material: same = same && o.material == ref.material; break;
            case Attribute::Colour: same = same && o.colour.has_value() && o.colour == ref.colour; break;
          }
        }
        if (same) {
          valid.push_back(c.image_id);
          break;
        }
      }
    }
    out.push_back(std::move(valid));
  }
  return out;
}

SplitSizes default_splits(std::size_t n_images) {
  SplitSizes s;
  s.train = n_images / 6;
  s.query = n_images / 6;
  s.candidates = n_images - s.train - s.query;
  return s;
}

}  // namespace oadino::synth

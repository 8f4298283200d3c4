#include "oadino/segment/segmenter.hpp"

#include <algorithm>
#include <numeric>

#include "oadino/error.hpp"

namespace oadino {

std::size_t ForegroundMask::popcount() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median of an empty set");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

std::vector<std::uint8_t> threshold_above_median(std::span<const double> values) {
  const double m = median({values.begin(), values.end()});
  std::vector<std::uint8_t> bits(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) bits[i] = values[i] > m ? 1 : 0;
  return bits;
}

std::vector<std::vector<std::size_t>> partition_batches(std::size_t n_images, std::size_t t) {
  if (t == 0) throw ArgumentError("batch size t must be positive");
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n_images; start += t) {
    std::vector<std::size_t> batch(std::min(t, n_images - start));
    std::iota(batch.begin(), batch.end(), start);
    batches.push_back(std::move(batch));
  }
  if (batches.size() >= 2 && batches.back().size() < 2) {
    auto tail = std::move(batches.back());
    batches.pop_back();
    batches.back().insert(batches.back().end(), tail.begin(), tail.end());
  }
  return batches;
}

namespace {

void check_batch(std::span<const PatchEmbeddingSet> batch) {
  if (batch.empty()) throw ArgumentError("segmentation batch is empty");
  const auto& first = batch.front();
  for (const auto& set : batch) {
    set.validate();
    if (set.grid_h != first.grid_h || set.grid_w != first.grid_w || set.dim != first.dim) {
      throw ArgumentError("batch sets disagree on grid shape or embedding dimension (" + set.image_id + ")");
    }
  }
}

RowMatrix stack_rows(std::span<const PatchEmbeddingSet> batch) {
  const auto p = batch.front().patch_count();
  const auto dim = batch.front().dim;
  RowMatrix rows(static_cast<Eigen::Index>(batch.size() * p), static_cast<Eigen::Index>(dim));
  Eigen::Index r = 0;
  for (const auto& set : batch) {
    for (std::size_t i = 0; i < p; ++i, ++r) {
      const auto row = set.row(i);
      for (std::size_t d = 0; d < dim; ++d) rows(r, static_cast<Eigen::Index>(d)) = row[d];
    }
  }
  return rows;
}

std::vector<double> project_pc1(const RowMatrix& rows, const PcaBasis& basis) {
  const Eigen::VectorXd z = (rows.rowwise() - basis.mean.transpose()) * basis.components.col(0);
  return {z.data(), z.data() + z.size()};
}

std::vector<ForegroundMask> split_masks(std::span<const PatchEmbeddingSet> batch,
                                        const std::vector<std::uint8_t>& bits, MaskPass pass) {
  const auto p = batch.front().patch_count();
  std::vector<ForegroundMask> masks;
  masks.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ForegroundMask m{batch[i].image_id, batch[i].grid_h, batch[i].grid_w,
                     std::vector<std::uint8_t>(bits.begin() + static_cast<std::ptrdiff_t>(i * p),
                                               bits.begin() + static_cast<std::ptrdiff_t>((i + 1) * p)),
                     pass};
    masks.push_back(std::move(m));
  }
  return masks;
}

bool is_border(std::size_t index, std::size_t grid_h, std::size_t grid_w) {
  const std::size_t r = index / grid_w;
  const std::size_t c = index % grid_w;
  return r == 0 || c == 0 || r + 1 == grid_h || c + 1 == grid_w;
}

}  // namespace

SegmentationResult first_pass_mask(std::span<const PatchEmbeddingSet> batch) {
  check_batch(batch);
  const RowMatrix rows = stack_rows(batch);
  if (rows.rows() < 2) throw ArgumentError("first pass needs at least 2 patches in the batch");

  SegmentationResult result;
  result.basis = fit_pca(rows, 1);
  auto z = project_pc1(rows, result.basis);

  const std::size_t gh = batch.front().grid_h;
  const std::size_t gw = batch.front().grid_w;
  const std::size_t p = gh * gw;
  if (gh >= 3 && gw >= 3) {
    double border = 0.0, interior = 0.0;
    std::size_t n_border = 0, n_interior = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (is_border(i % p, gh, gw)) {
        border += z[i];
        ++n_border;
      } else {
        interior += z[i];
        ++n_interior;
      }
    }
    // Background dominates the image border.
    if (border / static_cast<double>(n_border) > interior / static_cast<double>(n_interior)) {
      result.orientation = -1;
      for (auto& v : z) v = -v;
    }
  }
  result.masks = split_masks(batch, threshold_above_median(z), MaskPass::First);
  return result;
}

SegmentationResult second_pass_refine(std::span<const PatchEmbeddingSet> batch,
                                      const PcaBasis& first_basis,
                                      std::span<const ForegroundMask> first_masks) {
  check_batch(batch);
  if (first_masks.size() != batch.size()) throw ArgumentError("one first-pass mask per image required");
  if (first_basis.dim() != batch.front().dim) {
    throw ArgumentError("first-pass basis dimension does not match the batch");
  }
  const std::size_t p = batch.front().patch_count();
  std::vector<std::uint8_t> first_bits;
  first_bits.reserve(batch.size() * p);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& m = first_masks[i];
    if (m.pass != MaskPass::First) throw ArgumentError("refinement requires first-pass masks");
    if (m.image_id != batch[i].image_id || m.patch_count() != p || m.bits.size() != p) {
      throw ArgumentError("first-pass mask " + m.image_id + " does not belong to this batch");
    }
    first_bits.insert(first_bits.end(), m.bits.begin(), m.bits.end());
  }
  const auto fg = std::count(first_bits.begin(), first_bits.end(), std::uint8_t{1});
  if (fg < 2) {
    throw RefinementError("refinement needs at least 2 foreground patches, first pass kept " +
                          std::to_string(fg));
  }

  const RowMatrix rows = stack_rows(batch);
  RowMatrix masked = rows;
  for (Eigen::Index r = 0; r < masked.rows(); ++r) {
    if (!first_bits[static_cast<std::size_t>(r)]) masked.row(r).setZero();
  }

  SegmentationResult result;
  result.basis = fit_pca(masked, 1);
  auto z = project_pc1(rows, result.basis);

  auto agreement = [&](const std::vector<std::uint8_t>& bits) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) same += bits[i] == first_bits[i];
    return same;
  };
  auto positive = threshold_above_median(z);
  for (auto& v : z) v = -v;
  auto negative = threshold_above_median(z);
  if (agreement(negative) > agreement(positive)) {
    result.orientation = -1;
    result.masks = split_masks(batch, negative, MaskPass::Refined);
  } else {
    result.masks = split_masks(batch, positive, MaskPass::Refined);
  }
  return result;
}

PatchGeometry patch_geometry(std::size_t image_w, std::size_t image_h, std::size_t grid_h,
                             std::size_t grid_w) {
  if (grid_h == 0 || grid_w == 0 || image_w == 0 || image_h == 0) {
    throw ArgumentError("patch grid and image must be non-empty");
  }
  PatchGeometry g;
  g.grid_h = grid_h;
  g.grid_w = grid_w;
  g.patch_h = (image_h + grid_h - 1) / grid_h;
  g.patch_w = (image_w + grid_w - 1) / grid_w;
  if ((grid_h - 1) * g.patch_h >= image_h || (grid_w - 1) * g.patch_w >= image_w) {
    throw ArgumentError("a " + std::to_string(grid_h) + "x" + std::to_string(grid_w) +
                        " grid cannot tile a " + std::to_string(image_w) + "x" +
                        std::to_string(image_h) + " image");
  }
  return g;
}

Extraction remap_and_extract(const Image& image, const ForegroundMask& mask) {
  image.validate();
  if (mask.bits.size() != mask.patch_count()) throw ArgumentError("mask bit count does not match its grid");
  const auto g = patch_geometry(image.width, image.height, mask.grid_h, mask.grid_w);

  Extraction out;
  out.masked = Image(image.id, image.width, image.height);
  for (std::size_t r = 0; r < g.grid_h; ++r) {
    for (std::size_t c = 0; c < g.grid_w; ++c) {
      const std::size_t index = r * g.grid_w + c;
      if (!mask.bits[index]) continue;
      const std::size_t y0 = r * g.patch_h, x0 = c * g.patch_w;
      const std::size_t h = std::min(g.patch_h, image.height - y0);
      const std::size_t w = std::min(g.patch_w, image.width - x0);
      for (std::size_t y = y0; y < y0 + h; ++y) {
        const float* src = &image.pixels[image.index(y, x0, 0)];
        std::copy(src, src + w * Image::kChannels, &out.masked.pixels[out.masked.index(y, x0, 0)]);
      }
      out.patches.push_back(make_object_patch(crop(image, x0, y0, w, h), index));
    }
  }
  return out;
}

std::optional<std::array<double, 3>> mean_foreground_rgb(const Image& image, const ForegroundMask& mask) {
  const auto g = patch_geometry(image.width, image.height, mask.grid_h, mask.grid_w);
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  std::size_t count = 0;
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      if (!mask.bits[(y / g.patch_h) * g.grid_w + x / g.patch_w]) continue;
      for (std::size_t c = 0; c < 3; ++c) sum[c] += image.at(y, x, c);
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  for (auto& s : sum) s /= static_cast<double>(count);
  return sum;
}

Image mask_visualization(const ForegroundMask& mask, std::size_t cell) {
  Image img(mask.image_id, mask.grid_w * cell, mask.grid_h * cell);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const float v = mask.bits[(y / cell) * mask.grid_w + x / cell] ? 1.0f : 0.0f;
      for (std::size_t c = 0; c < 3; ++c) img.at(y, x, c) = v;
    }
  }
  return img;
}

}  // namespace oadino

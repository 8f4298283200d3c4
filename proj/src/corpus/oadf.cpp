#include "oadino/corpus/oadf.hpp"

#include <cmath>

#include "oadino/error.hpp"
#include "oadino/util/binary_io.hpp"

namespace oadino {

void PatchEmbeddingSet::validate() const {
  if (grid_h == 0 || grid_w == 0) throw ArgumentError("embedding set " + image_id + " has an empty grid");
  if (dim == 0) throw ArgumentError("embedding set " + image_id + " has zero dimension");
  if (values.size() != patch_count() * dim) {
    throw ArgumentError("embedding set " + image_id + " value count does not match header");
  }
  for (float v : values) {
    if (!std::isfinite(v)) throw ArgumentError("embedding set " + image_id + " has a non-finite value");
  }
}

void GlobalFeature::validate() const {
  if (values.empty()) throw ArgumentError("global feature " + image_id + " is empty");
  double norm2 = 0.0;
  for (float v : values) {
    if (!std::isfinite(v)) throw ArgumentError("global feature " + image_id + " is not finite");
    norm2 += static_cast<double>(v) * v;
  }
  if (!(norm2 > 0.0)) throw ArgumentError("global feature " + image_id + " has zero norm");
}

std::vector<std::uint8_t> encode_oadf(const PatchEmbeddingSet& set) {
  set.validate();
  io::ByteWriter w;
  w.bytes().reserve(kOadfHeaderBytes + set.values.size() * 4);
  w.magic("OADF");
  w.u32(kOadfVersion);
  w.u32(set.grid_h);
  w.u32(set.grid_w);
  w.u32(set.dim);
  for (float v : set.values) w.f32(v);
  return w.take();
}

PatchEmbeddingSet decode_oadf(std::span<const std::uint8_t> bytes, std::string image_id) {
  io::ByteReader r(bytes, "OADF");
  r.expect_magic("OADF");
  const auto version = r.u32();
  if (version != kOadfVersion) r.fail("unsupported version " + std::to_string(version));
  PatchEmbeddingSet set;
  set.image_id = std::move(image_id);
  set.grid_h = r.u32();
  set.grid_w = r.u32();
  set.dim = r.u32();
  if (set.grid_h == 0 || set.grid_w == 0 || set.dim == 0) r.fail("zero dimension in header");
  const std::uint64_t count = std::uint64_t{set.grid_h} * set.grid_w * set.dim;
  if (count * 4 != r.remaining()) {
    r.fail("payload size mismatch, header implies " + std::to_string(count * 4) + " bytes but " +
           std::to_string(r.remaining()) + " present");
  }
  set.values.resize(count);
  for (auto& v : set.values) {
    v = r.f32();
    if (!std::isfinite(v)) r.fail("non-finite value");
  }
  return set;
}

void write_embeddings(const PatchEmbeddingSet& set, const std::filesystem::path& path) {
  io::write_file(path, encode_oadf(set));
}

PatchEmbeddingSet read_embeddings(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return decode_oadf(bytes, path.stem().string());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_global(const GlobalFeature& feature, const std::filesystem::path& path) {
  feature.validate();
  PatchEmbeddingSet set{feature.image_id, 1, 1, static_cast<std::uint32_t>(feature.values.size()),
                        feature.values};
  write_embeddings(set, path);
}

GlobalFeature read_global(const std::filesystem::path& path) {
  auto set = read_embeddings(path);
  if (set.grid_h != 1 || set.grid_w != 1) {
    throw FormatError(path.string() + ": global feature must have a 1x1 grid");
  }
  GlobalFeature feature{set.image_id, std::move(set.values)};
  try {
    feature.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return feature;
}

}  // namespace oadino

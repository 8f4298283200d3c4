#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oadino/error.hpp"
#include "oadino/segment/pca.hpp"
#include "oadino/segment/segmenter.hpp"
#include "oadino/synthetic/synthetic.hpp"
#include "oadino/util/rng.hpp"
#include "oracles.hpp"

using namespace oadino;

namespace {

RowMatrix random_rows(Rng& rng, std::size_t n, std::size_t d) {
  RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  // Anisotropic so the spectrum is well separated.
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal() * (1.0 + 0.5 * static_cast<double>(j));
  }
  return m;
}

std::vector<PatchEmbeddingSet> synthetic_batch(std::uint64_t seed, std::size_t t, double noise = 0.05) {
  synth::SynthConfig c;
  c.seed = seed;
  c.n_images = t;
  c.noise = noise;
  std::vector<PatchEmbeddingSet> out;
  for (auto& s : synth::generate(c)) out.push_back(std::move(s.embeddings));
  return out;
}

}  // namespace

TEST(Pca, OneDimensionalData) {
  RowMatrix m(4, 2);
  m << 1, 0, -1, 0, 2, 0, -2, 0;
  PcaBasis b = fit_pca(m, 1);
  EXPECT_NEAR(b.mean.norm(), 0.0, 1e-15);
  EXPECT_NEAR(b.components(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(b.components(1, 0), 0.0, 1e-12);
  PcaBasis full = fit_pca(m, 2);
  EXPECT_NEAR(full.explained_variance(0), 10.0 / 3.0, 1e-12);
  EXPECT_NEAR(full.explained_variance(0) / full.explained_variance.sum(), 1.0, 1e-12);
}

TEST(Pca, RankOneDifference) {
  RowMatrix m(5, 3);
  for (int i = 0; i < 4; ++i) m.row(i) << 1, 2, 3;
  m.row(4) << 1, 5, -1;
  PcaBasis b = fit_pca(m, 1);
  Eigen::Vector3d diff(0, 3, -4);
  diff.normalize();
  EXPECT_NEAR(std::abs(b.components.col(0).dot(diff)), 1.0, 1e-12);
}

TEST(Pca, MatchesJacobiOnSmallMatrix) {
  Rng rng(17);
  RowMatrix m = random_rows(rng, 8, 3);
  PcaBasis b = fit_pca(m, 3);
  oracle::Dense rows(8, std::vector<double>(3));
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 3; ++j) rows[i][j] = m(i, j);
  }
  auto ref = oracle::jacobi(oracle::covariance(rows));
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(b.explained_variance(static_cast<Eigen::Index>(k)), ref.values[k], 1e-10 * ref.values[0]);
    oracle::sign_normalise(ref.vectors[k]);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(b.components(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)), ref.vectors[k][i], 1e-10);
    }
  }
}

TEST(Pca, ComponentsOrthonormalAndSorted) {
  Rng rng(2);
  RowMatrix m = random_rows(rng, 60, 12);
  PcaBasis b = fit_pca(m, 12 - 1);
  Eigen::MatrixXd g = b.components.transpose() * b.components;
  EXPECT_LT((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index k = 1; k < b.explained_variance.size(); ++k) {
    EXPECT_GE(b.explained_variance(k - 1), b.explained_variance(k));
  }
}

TEST(Pca, Preconditions) {
  RowMatrix one(1, 3);
  one << 1, 2, 3;
  EXPECT_THROW(fit_pca(one, 1), ArgumentError);
  RowMatrix m(3, 2);
  m << 1, 2, 3, 4, 5, 7;
  EXPECT_THROW(fit_pca(m, 0), ArgumentError);
  EXPECT_THROW(fit_pca(m, 3), ArgumentError);
  m(0, 0) = std::nan("");
  EXPECT_THROW(fit_pca(m, 1), ArgumentError);
}

TEST(Pca, SignNormalisation) {
  Eigen::VectorXd v(3);
  v << 0.1, -0.9, 0.2;
  normalize_sign(v);
  EXPECT_GT(v(1), 0.0);
  Eigen::VectorXd tie(2);
  tie << -0.5, 0.5;
  normalize_sign(tie);
  EXPECT_GT(tie(0), 0.0);
}

TEST(Median, ThresholdExamples) {
  std::vector<double> odd = {3, 1, 4, 1, 5};
  EXPECT_EQ(median(odd), 3.0);
  EXPECT_EQ(threshold_above_median(odd), (std::vector<std::uint8_t>{0, 0, 1, 0, 1}));
  std::vector<double> even = {0.1, 0.9, 0.5, 0.2};
  EXPECT_NEAR(median(even), 0.35, 1e-15);
  EXPECT_EQ(threshold_above_median(even), (std::vector<std::uint8_t>{0, 1, 1, 0}));
}

TEST(Batches, TrailingSingletonMerges) {
  auto b = partition_batches(101, 50);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[1].size(), 51u);
  auto c = partition_batches(120, 50);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[2].size(), 20u);
}

TEST(Segmentation, NoiselessMarkerSeparatesExactly) {
  auto batch = synthetic_batch(4, 50, 0.0);
  synth::SynthConfig c;
  c.seed = 4;
  c.n_images = 50;
  c.noise = 0.0;
  auto scenes = synth::generate(c);
  auto first = first_pass_mask(batch);
  for (std::size_t i = 0; i < scenes.size(); ++i) EXPECT_EQ(first.masks[i].bits, scenes[i].truth.bits);
}

TEST(Segmentation, FirstPassBitBound) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto batch = synthetic_batch(seed, 7);
    auto r = first_pass_mask(batch);
    std::size_t bits = 0, total = 0;
    for (const auto& m : r.masks) {
      bits += m.popcount();
      total += m.patch_count();
    }
    EXPECT_LE(bits, (total + 1) / 2);
  }
  // Ties at the median never add bits.
  std::vector<PatchEmbeddingSet> flat(3, PatchEmbeddingSet{"f", 2, 2, 2, std::vector<float>(8, 1.0f)});
  flat[1].values[0] = 2.0f;
  auto r = first_pass_mask(flat);
  std::size_t bits = 0;
  for (const auto& m : r.masks) bits += m.popcount();
  EXPECT_LE(bits, 6u);
}

TEST(Segmentation, SignAndScaleInvariance) {
  auto batch = synthetic_batch(9, 12, 0.3);
  auto first = first_pass_mask(batch);
  auto refined = second_pass_refine(batch, first.basis, first.masks);
  for (double factor : {-1.0, 3.5, -0.25}) {
    auto scaled = batch;
    for (auto& s : scaled) {
      for (float& v : s.values) v = static_cast<float>(v * factor);
    }
    auto f2 = first_pass_mask(scaled);
    auto r2 = second_pass_refine(scaled, f2.basis, f2.masks);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      EXPECT_EQ(f2.masks[i].bits, first.masks[i].bits) << "factor " << factor;
      EXPECT_EQ(r2.masks[i].bits, refined.masks[i].bits) << "factor " << factor;
    }
  }
}

TEST(Segmentation, PerfectTightClusterIsStable) {
  auto batch = synthetic_batch(5, 20, 0.0);
  auto first = first_pass_mask(batch);
  auto refined = second_pass_refine(batch, first.basis, first.masks);
  for (std::size_t i = 0; i < batch.size(); ++i) EXPECT_EQ(refined.masks[i].bits, first.masks[i].bits);
  EXPECT_EQ(refined.masks[0].pass, MaskPass::Refined);
}

TEST(Segmentation, RefinementNeedsTwoForegroundPatches) {
  auto batch = synthetic_batch(6, 4);
  auto first = first_pass_mask(batch);
  auto empty = first.masks;
  for (auto& m : empty) std::fill(m.bits.begin(), m.bits.end(), 0);
  empty[0].bits[3] = 1;
  EXPECT_THROW(second_pass_refine(batch, first.basis, empty), RefinementError);
}

TEST(Remap, TwoByTwoGrid) {
  Image img("r", 4, 4);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = 0.5f + 0.001f * static_cast<float>(i % 7);
  ForegroundMask mask{"r", 2, 2, {1, 0, 0, 1}, MaskPass::Refined};
  Extraction e = remap_and_extract(img, mask);
  ASSERT_EQ(e.patches.size(), 2u);
  EXPECT_EQ(e.patches[0].patch_index, 0u);
  EXPECT_EQ(e.patches[1].patch_index, 3u);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      const bool keep = (y < 2 && x < 2) || (y >= 2 && x >= 2);
      for (std::size_t c = 0; c < 3; ++c) {
        EXPECT_EQ(e.masked.at(y, x, c), keep ? img.at(y, x, c) : 0.0f);
      }
    }
  }
}

TEST(Remap, AllZeroAndAllOne) {
  Image img("r", 8, 8, 0.7f);
  ForegroundMask zero{"r", 4, 4, std::vector<std::uint8_t>(16, 0), MaskPass::First};
  Extraction a = remap_and_extract(img, zero);
  EXPECT_TRUE(a.patches.empty());
  for (float v : a.masked.pixels) EXPECT_EQ(v, 0.0f);
  ForegroundMask one{"r", 4, 4, std::vector<std::uint8_t>(16, 1), MaskPass::First};
  Extraction b = remap_and_extract(img, one);
  EXPECT_EQ(b.patches.size(), 16u);
  EXPECT_EQ(b.masked.pixels, img.pixels);
}

TEST(Remap, PatchCountEqualsPopcount) {
  Rng rng(8);
  Image img("r", 20, 20, 0.3f);
  for (int trial = 0; trial < 20; ++trial) {
    ForegroundMask m{"r", 5, 5, std::vector<std::uint8_t>(25), MaskPass::First};
    for (auto& b : m.bits) b = rng.below(2) ? 1 : 0;
    auto e = remap_and_extract(img, m);
    ASSERT_EQ(e.patches.size(), m.popcount());
    for (std::size_t i = 1; i < e.patches.size(); ++i) EXPECT_LT(e.patches[i - 1].patch_index, e.patches[i].patch_index);
  }
}

TEST(Geometry, CeilingPatchSize) {
  auto g = patch_geometry(518, 518, 37, 37);
  EXPECT_EQ(g.patch_w, 14u);
  auto h = patch_geometry(10, 10, 3, 3);
  EXPECT_EQ(h.patch_w, 4u);
  EXPECT_THROW(patch_geometry(4, 4, 3, 3), ArgumentError);
}

TEST(MaskIo, RoundTripBitExact) {
  Rng rng(1);
  ForegroundMask m{"m", 37, 37, std::vector<std::uint8_t>(37 * 37), MaskPass::Refined};
  for (auto& b : m.bits) b = rng.below(2) ? 1 : 0;
  auto bytes = encode_mask(m);
  EXPECT_EQ(bytes.size(), 20u + 37u * 5u);
  ForegroundMask back = decode_mask(bytes, "m");
  EXPECT_EQ(back, m);
  EXPECT_EQ(encode_mask(back), bytes);
  bytes[1] = 'X';
  EXPECT_THROW(decode_mask(bytes), FormatError);
}

TEST(MeanRgb, ForegroundOnly) {
  Image img("c", 2, 1);
  img.pixels = {1, 0, 0, 0, 0, 1};
  ForegroundMask m{"c", 1, 2, {1, 0}, MaskPass::First};
  auto rgb = mean_foreground_rgb(img, m);
  ASSERT_TRUE(rgb.has_value());
  EXPECT_DOUBLE_EQ((*rgb)[0], 1.0);
  EXPECT_DOUBLE_EQ((*rgb)[2], 0.0);
  m.bits = {0, 0};
  EXPECT_FALSE(mean_foreground_rgb(img, m).has_value());
}

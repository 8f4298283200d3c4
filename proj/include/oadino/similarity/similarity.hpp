#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oadino/corpus/oadf.hpp"
#include "oadino/segment/pca.hpp"

namespace oadino {

// One vector v_i = [eps, z_i] per foreground patch.
struct JointRepresentation {
  std::string image_id;
  std::uint32_t n_g = 0;
  std::uint32_t n_z = 0;
  RowMatrix vectors;  // m x (n_g + n_z)

  std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  // m >= 1, dim == n_g + n_z, finite rows of nonzero norm.
  void validate() const;
};

// Throws RepresentationError when `latents` is empty and ArgumentError on
// ragged latents or an invalid global feature.
JointRepresentation build_joint(const GlobalFeature& global, std::span<const std::vector<double>> latents);
// Baseline: a single vector holding the global feature (n_z = 0).
JointRepresentation global_only(const GlobalFeature& global);

// Rows scaled to unit length, ready for repeated scoring.
struct PreparedRepresentation {
  std::string image_id;
  RowMatrix unit;
};
PreparedRepresentation prepare(const JointRepresentation& rep);

struct SimilarityMatrix {
  std::string query_id;
  std::string candidate_id;
  RowMatrix entries;  // m x m', each clamped to [-1, 1]
};

SimilarityMatrix cosine_matrix(const JointRepresentation& a, const JointRepresentation& b);

// Mean over a's vectors of the best cosine against any of b's vectors.
// Not symmetric in (a, b).
double score(const JointRepresentation& a, const JointRepresentation& b);
double score(const PreparedRepresentation& a, const PreparedRepresentation& b);

struct RankedEntry {
  std::string candidate_id;
  double score = 0.0;
};

struct RankedList {
  std::string query_id;
  std::vector<RankedEntry> entries;  // descending score, ties by candidate id
};

// Sort key used by rank_candidates.
bool ranks_before(const RankedEntry& a, const RankedEntry& b);

RankedList rank_candidates(const PreparedRepresentation& query, std::span<const PreparedRepresentation> candidates,
                           unsigned threads = 1);
RankedList rank_candidates(const JointRepresentation& query, std::span<const JointRepresentation> candidates,
                           unsigned threads = 1);

// CSV "rank,candidate_id,score", scores with 9 decimals, ranks from 1.
std::string ranked_csv(const RankedList& list);

// OADF container with grid m x 1 and dim n_v. n_g is not stored in the
// container and must be supplied when reading back.
PatchEmbeddingSet joint_to_oadf(const JointRepresentation& rep);
JointRepresentation joint_from_oadf(const PatchEmbeddingSet& set, std::uint32_t n_g);

}  // namespace oadino

#include "oadino/similarity/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "oadino/error.hpp"
#include "oadino/util/parallel.hpp"

namespace oadino {

void JointRepresentation::validate() const {
  if (vectors.rows() == 0) throw RepresentationError("representation " + image_id + " has no vectors");
  if (dim() != std::size_t{n_g} + n_z) {
    throw ArgumentError("representation " + image_id + " has width " + std::to_string(dim()) +
                        " but n_g + n_z = " + std::to_string(std::size_t{n_g} + n_z));
  }
  if (!vectors.allFinite()) throw ArgumentError("representation " + image_id + " has non-finite values");
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    if (!(vectors.row(i).norm() > 0.0)) {
      throw ArgumentError("representation " + image_id + " vector " + std::to_string(i) + " has zero norm");
    }
  }
}

JointRepresentation build_joint(const GlobalFeature& global, std::span<const std::vector<double>> latents) {
  global.validate();
  if (latents.empty()) throw RepresentationError("image " + global.image_id + " has no foreground latents");
  const std::size_t n_z = latents.front().size();
  JointRepresentation rep;
  rep.image_id = global.image_id;
  rep.n_g = static_cast<std::uint32_t>(global.dim());
  rep.n_z = static_cast<std::uint32_t>(n_z);
  rep.vectors.resize(static_cast<Eigen::Index>(latents.size()), static_cast<Eigen::Index>(global.dim() + n_z));
  for (std::size_t i = 0; i < latents.size(); ++i) {
    if (latents[i].size() != n_z) throw ArgumentError("latents of image " + global.image_id + " are ragged");
    auto row = rep.vectors.row(static_cast<Eigen::Index>(i));
    for (std::size_t d = 0; d < global.dim(); ++d) row[static_cast<Eigen::Index>(d)] = global.values[d];
    for (std::size_t d = 0; d < n_z; ++d) row[static_cast<Eigen::Index>(global.dim() + d)] = latents[i][d];
  }
  rep.validate();
  return rep;
}

JointRepresentation global_only(const GlobalFeature& global) {
  global.validate();
  JointRepresentation rep;
  rep.image_id = global.image_id;
  rep.n_g = static_cast<std::uint32_t>(global.dim());
  rep.vectors.resize(1, static_cast<Eigen::Index>(global.dim()));
  for (std::size_t d = 0; d < global.dim(); ++d) rep.vectors(0, static_cast<Eigen::Index>(d)) = global.values[d];
  return rep;
}

PreparedRepresentation prepare(const JointRepresentation& rep) {
  rep.validate();
  PreparedRepresentation p{rep.image_id, rep.vectors};
  p.unit.rowwise().normalize();
  return p;
}

namespace {

void check_dims(const PreparedRepresentation& a, const PreparedRepresentation& b) {
  if (a.unit.cols() != b.unit.cols()) {
    throw ArgumentError("representations " + a.image_id + " and " + b.image_id + " differ in width (" +
                        std::to_string(a.unit.cols()) + " vs " + std::to_string(b.unit.cols()) + ")");
  }
}

}  // namespace

SimilarityMatrix cosine_matrix(const JointRepresentation& a, const JointRepresentation& b) {
  const auto pa = prepare(a), pb = prepare(b);
  check_dims(pa, pb);
  SimilarityMatrix s{a.image_id, b.image_id, pa.unit * pb.unit.transpose()};
  s.entries = s.entries.cwiseMax(-1.0).cwiseMin(1.0);
  return s;
}

double score(const PreparedRepresentation& a, const PreparedRepresentation& b) {
  check_dims(a, b);
  const Eigen::MatrixXd s = a.unit * b.unit.transpose();
  const double mean = s.rowwise().maxCoeff().mean();
  return std::clamp(mean, -1.0, 1.0);
}

double score(const JointRepresentation& a, const JointRepresentation& b) { return score(prepare(a), prepare(b)); }

bool ranks_before(const RankedEntry& a, const RankedEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.candidate_id < b.candidate_id;
}

RankedList rank_candidates(const PreparedRepresentation& query, std::span<const PreparedRepresentation> candidates,
                           unsigned threads) {
  if (candidates.empty()) throw ArgumentError("no candidates to rank against " + query.image_id);
  RankedList list{query.image_id, std::vector<RankedEntry>(candidates.size())};
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    list.entries[i] = {candidates[i].image_id, score(query, candidates[i])};
  });
  std::sort(list.entries.begin(), list.entries.end(), ranks_before);
  for (std::size_t i = 1; i < list.entries.size(); ++i) {
    if (list.entries[i].candidate_id == list.entries[i - 1].candidate_id) {
      throw ArgumentError("duplicate candidate id " + list.entries[i].candidate_id);
    }
  }
  return list;
}

RankedList rank_candidates(const JointRepresentation& query, std::span<const JointRepresentation> candidates,
                           unsigned threads) {
  std::vector<PreparedRepresentation> prepared;
  prepared.reserve(candidates.size());
  for (const auto& c : candidates) prepared.push_back(prepare(c));
  return rank_candidates(prepare(query), prepared, threads);
}

std::string ranked_csv(const RankedList& list) {
  std::string out = "rank,candidate_id,score\n";
  char buf[64];
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9f", list.entries[i].score);
    out += std::to_string(i + 1) + "," + list.entries[i].candidate_id + "," + buf + "\n";
  }
  return out;
}

PatchEmbeddingSet joint_to_oadf(const JointRepresentation& rep) {
  rep.validate();
  PatchEmbeddingSet set;
  set.image_id = rep.image_id;
  set.grid_h = static_cast<std::uint32_t>(rep.size());
  set.grid_w = 1;
  set.dim = static_cast<std::uint32_t>(rep.dim());
  set.values.reserve(rep.size() * rep.dim());
  for (Eigen::Index i = 0; i < rep.vectors.rows(); ++i) {
    for (Eigen::Index d = 0; d < rep.vectors.cols(); ++d) set.values.push_back(static_cast<float>(rep.vectors(i, d)));
  }
  return set;
}

JointRepresentation joint_from_oadf(const PatchEmbeddingSet& set, std::uint32_t n_g) {
  set.validate();
  if (set.grid_w != 1) throw FormatError("joint representation " + set.image_id + " must have grid width 1");
  if (n_g > set.dim) throw FormatError("joint representation " + set.image_id + " is narrower than n_g");
  JointRepresentation rep;
  rep.image_id = set.image_id;
  rep.n_g = n_g;
  rep.n_z = set.dim - n_g;
  rep.vectors.resize(set.grid_h, set.dim);
  for (std::size_t i = 0; i < set.patch_count(); ++i) {
    const auto row = set.row(i);
    for (std::size_t d = 0; d < set.dim; ++d) {
      rep.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = row[d];
    }
  }
  rep.validate();
  return rep;
}

}  // namespace oadino

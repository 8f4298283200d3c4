#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace oadino {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Top-K principal axes of a sample. Components are orthonormal, sorted by
// nonincreasing explained variance, and sign-normalised so each component's
// largest-magnitude coordinate is positive (ties go to the lowest index).
struct PcaBasis {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;          // dim x K, one component per column
  Eigen::VectorXd explained_variance;  // K, covariance eigenvalues (1/(N-1))

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t rank() const { return static_cast<std::size_t>(components.cols()); }

  // (row - mean) . component_k
  template <typename Row>
  double project(const Row& row, std::size_t k = 0) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < mean.size(); ++i) {
      acc += (static_cast<double>(row[static_cast<std::size_t>(i)]) - mean[i]) * components(i, k);
    }
    return acc;
  }
};

// Flips `v` so its largest-magnitude entry is positive.
void normalize_sign(Eigen::Ref<Eigen::VectorXd> v);

// Covariance uses the 1/(N-1) normalisation. Throws ArgumentError for N < 2,
// K outside [1, min(N-1, dim)] or non-finite input, and NumericalError if the
// symmetric eigensolver does not converge.
PcaBasis fit_pca(const Eigen::Ref<const RowMatrix>& rows, std::size_t k);

}  // namespace oadino

#include "oadino/segment/pca.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "oadino/error.hpp"

namespace oadino {

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v.size() > 0 && v[best] < 0.0) v = -v;
}

PcaBasis fit_pca(const Eigen::Ref<const RowMatrix>& rows, std::size_t k) {
  const auto n = static_cast<std::size_t>(rows.rows());
  const auto dim = static_cast<std::size_t>(rows.cols());
  if (n < 2) throw ArgumentError("fit_pca needs at least 2 rows, got " + std::to_string(n));
  if (dim == 0) throw ArgumentError("fit_pca needs a nonzero dimension");
  if (k < 1 || k > std::min(n - 1, dim)) {
    throw ArgumentError("fit_pca: K=" + std::to_string(k) + " outside [1, min(N-1, dim)]");
  }
  if (!rows.allFinite()) throw ArgumentError("fit_pca: non-finite input");

  PcaBasis basis;
  basis.mean = rows.colwise().mean().transpose();
  const RowMatrix centered = rows.rowwise() - basis.mean.transpose();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const auto residual = [&](const Eigen::MatrixXd& vecs, const Eigen::VectorXd& vals) {
    return (cov * vecs - vecs * vals.asDiagonal()).cwiseAbs().maxCoeff();
  };
  if (solver.info() != Eigen::Success) {
    throw NumericalError("fit_pca: eigensolver did not converge");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  const double res = residual(vectors, values);
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if (!std::isfinite(res) || res > 1e-8 * scale * static_cast<double>(dim)) {
    throw NumericalError("fit_pca: eigen-decomposition residual " + std::to_string(res));
  }

  const auto kk = static_cast<Eigen::Index>(k);
  basis.components.resize(static_cast<Eigen::Index>(dim), kk);
  basis.explained_variance.resize(kk);
  for (Eigen::Index j = 0; j < kk; ++j) {
    const Eigen::Index src = static_cast<Eigen::Index>(dim) - 1 - j;
    basis.components.col(j) = vectors.col(src);
    normalize_sign(basis.components.col(j));
    basis.explained_variance[j] = std::max(0.0, values[src]);
  }
  return basis;
}

}  // namespace oadino

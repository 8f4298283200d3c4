#pragma once

// Batched forward/backward passes shared by the single-sample API, training
// and latent extraction. Samples are columns.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "oadino/vae/vae.hpp"

namespace oadino::vae::detail {

using RowMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using VecMap = Eigen::Map<const Eigen::VectorXd>;

struct ForwardCache {
  std::vector<Eigen::MatrixXd> encoder;  // encoder[0] = input, encoder[i] = hidden i output
  Eigen::MatrixXd mu;
  Eigen::MatrixXd logvar_raw;
  Eigen::MatrixXd logvar;  // clamped
  Eigen::MatrixXd noise;   // empty when z = mu
  Eigen::MatrixXd z;
  std::vector<Eigen::MatrixXd> decoder;  // decoder hidden outputs
  Eigen::MatrixXd output;                // reconstruction
};

RowMap weights(const VaeModel& model, std::size_t layer);
VecMap bias(const VaeModel& model, std::size_t layer);

// Encoder only: fills encoder activations, mu and logvar.
void encode_batch(const VaeModel& model, const Eigen::MatrixXd& input, ForwardCache& cache);
Eigen::MatrixXd decode_batch(const VaeModel& model, const Eigen::MatrixXd& z,
                             std::vector<Eigen::MatrixXd>* hidden = nullptr);

// Full pass. `noise` may be empty, in which case z = mu.
void forward(const VaeModel& model, const Eigen::MatrixXd& input, const Eigen::MatrixXd& noise,
             ForwardCache& cache);

// Per-column reconstruction and KL terms.
Eigen::VectorXd recon_terms(const ForwardCache& cache);
Eigen::VectorXd kl_terms(const ForwardCache& cache);

// grad += d(sum over columns of total loss)/d(params).
void accumulate_gradient(const VaeModel& model, const ForwardCache& cache, Eigen::Ref<Eigen::VectorXd> grad);

Eigen::MatrixXd to_matrix(std::span<const std::vector<float>> samples, std::size_t begin,
                          std::size_t count, std::size_t dim);

}  // namespace oadino::vae::detail

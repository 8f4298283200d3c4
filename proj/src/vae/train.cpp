#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "network.hpp"
#include "oadino/error.hpp"
#include "oadino/util/parallel.hpp"
#include "oadino/util/rng.hpp"

namespace oadino::vae {

namespace {

// Gradient shard width. Fixed so the summation order never depends on the
// worker count.
constexpr std::size_t kShard = 64;

struct ShardOut {
  Eigen::VectorXd grad;  // allocated once, cleared per batch
  Eigen::VectorXd recon;
  Eigen::VectorXd kl;
};

}  // namespace

TrainResult train(VaeModel model, std::span<const std::vector<float>> samples, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  model.validate();
  if (samples.empty()) throw ArgumentError("training needs at least one sample");
  const std::size_t dim = model.input_dim();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != dim) {
      throw ArgumentError("sample " + std::to_string(i) + " has " + std::to_string(samples[i].size()) +
                          " values, model expects " + std::to_string(dim));
    }
    for (float v : samples[i]) {
      if (!(v >= 0.0f && v <= 1.0f)) throw ArgumentError("sample " + std::to_string(i) + " has a value outside [0,1]");
    }
  }

  const std::size_t n_params = model.parameters().size();
  const std::size_t n_latent = model.latent_dim();
  const double beta = model.beta();
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params));
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params));
  Eigen::Map<Eigen::VectorXd> theta(model.parameters().data(), static_cast<Eigen::Index>(n_params));
  double b1_pow = 1.0, b2_pow = 1.0;

  Rng rng(config.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{model, {}, {}};
  const std::size_t max_shards = (std::min(config.batch_size, samples.size()) + kShard - 1) / kShard;
  std::vector<ShardOut> shards(max_shards);
  for (auto& s : shards) s.grad.resize(static_cast<Eigen::Index>(n_params));
  Eigen::VectorXd grad(static_cast<Eigen::Index>(n_params));
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double sum_total = 0.0, sum_recon = 0.0, sum_kl = 0.0;
    double epoch_min_kl = std::numeric_limits<double>::infinity();
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index) {
      const std::size_t count = std::min(config.batch_size, order.size() - begin);
      Eigen::MatrixXd noise(static_cast<Eigen::Index>(n_latent), static_cast<Eigen::Index>(count));
      for (Eigen::Index j = 0; j < noise.cols(); ++j) {
        for (Eigen::Index i = 0; i < noise.rows(); ++i) noise(i, j) = rng.normal();
      }

      const std::size_t n_shards = (count + kShard - 1) / kShard;
      parallel_for(n_shards, config.threads, [&](std::size_t s) {
        const std::size_t s0 = s * kShard;
        const std::size_t sn = std::min(kShard, count - s0);
        Eigen::MatrixXd x(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(sn));
        for (std::size_t j = 0; j < sn; ++j) {
          const auto& src = samples[order[begin + s0 + j]];
          for (std::size_t i = 0; i < dim; ++i) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = src[i];
          }
        }
        detail::ForwardCache cache;
        detail::forward(model, x, noise.middleCols(static_cast<Eigen::Index>(s0), static_cast<Eigen::Index>(sn)),
                        cache);
        auto& out = shards[s];
        out.recon = detail::recon_terms(cache);
        out.kl = detail::kl_terms(cache);
        out.grad.setZero();
        detail::accumulate_gradient(model, cache, out.grad);
      });

      grad.setZero();
      double b_recon = 0.0, b_kl = 0.0, b_min_kl = std::numeric_limits<double>::infinity();
      for (std::size_t si = 0; si < n_shards; ++si) {
        const auto& s = shards[si];
        grad += s.grad;
        b_recon += s.recon.sum();
        b_kl += s.kl.sum();
        b_min_kl = std::min(b_min_kl, s.kl.minCoeff());
      }
      const double b_total = b_recon + beta * b_kl;
      if (!std::isfinite(b_total) || !grad.allFinite()) {
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index));
      }
      const double inv = 1.0 / static_cast<double>(count);
      grad *= inv;

      // Adam with bias correction.
      b1_pow *= config.beta1;
      b2_pow *= config.beta2;
      m1 = config.beta1 * m1 + (1.0 - config.beta1) * grad;
      m2 = config.beta2 * m2 + (1.0 - config.beta2) * grad.cwiseAbs2();
      const double step = config.learning_rate / (1.0 - b1_pow);
      const double c2 = 1.0 / (1.0 - b2_pow);
      theta.array() -= step * m1.array() / ((m2.array() * c2).sqrt() + config.epsilon);

      sum_total += b_total;
      sum_recon += b_recon;
      sum_kl += b_kl;
      epoch_min_kl = std::min(epoch_min_kl, b_min_kl);
      result.steps.push_back({epoch, batch_index, {b_total * inv, b_recon * inv, b_kl * inv}, b_min_kl});
    }
    const double n = static_cast<double>(samples.size());
    EpochStats stats{epoch, sum_total / n, sum_recon / n, sum_kl / n, epoch_min_kl};
    result.trace.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  if (!theta.allFinite()) throw NumericalError("training produced non-finite parameters");
  result.model = std::move(model);
  return result;
}

std::vector<std::vector<double>> extract_latents(const VaeModel& model, std::span<const std::vector<float>> samples,
                                                 unsigned threads) {
  std::vector<std::vector<double>> out(samples.size());
  const std::size_t n_chunks = (samples.size() + kLatentChunk - 1) / kLatentChunk;
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kLatentChunk;
    const std::size_t count = std::min(kLatentChunk, samples.size() - begin);
    detail::ForwardCache cache;
    detail::encode_batch(model, detail::to_matrix(samples, begin, count, model.input_dim()), cache);
    for (std::size_t j = 0; j < count; ++j) {
      auto& v = out[begin + j];
      v.resize(model.latent_dim());
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = cache.mu(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  });
  return out;
}

}  // namespace oadino::vae

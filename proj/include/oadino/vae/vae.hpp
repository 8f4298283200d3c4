#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "oadino/corpus/image.hpp"

namespace oadino::vae {

inline constexpr double kDefaultBeta = 1e-4;
inline constexpr std::size_t kDefaultLatent = 32;
inline constexpr double kLogvarMin = -10.0;
inline constexpr double kLogvarMax = 10.0;

enum class Activation : std::uint32_t { Identity = 0, Relu = 1, Sigmoid = 2 };

struct LayerShape {
  std::uint32_t in = 0;
  std::uint32_t out = 0;
  Activation activation = Activation::Identity;
  bool operator==(const LayerShape&) const = default;
};

// Fully connected encoder input -> hidden... -> (mu, logvar) heads and the
// mirrored decoder latent -> reversed hidden... -> input with a logistic
// output. The default is 12288-512-128-(32,32) for 64x64x3 patches.
struct Architecture {
  std::size_t input_dim = ObjectPatch::kValues;
  std::vector<std::size_t> hidden = {512, 128};
  std::size_t latent_dim = kDefaultLatent;

  // Order: encoder hidden layers, mu head, logvar head, decoder hidden
  // layers, output layer.
  std::vector<LayerShape> layers() const;
  std::size_t parameter_count() const;
  std::size_t mu_layer() const { return hidden.size(); }
  std::size_t logvar_layer() const { return hidden.size() + 1; }
  std::size_t decoder_begin() const { return hidden.size() + 2; }
  std::size_t output_layer() const { return 2 * hidden.size() + 2; }

  // Rebuilds an architecture from a layer table; throws FormatError if the
  // table is not a consistent encoder/decoder chain.
  static Architecture from_layers(const std::vector<LayerShape>& layers);
  bool operator==(const Architecture&) const = default;
};

// Parameters live in one flat array. Each layer stores its weight matrix
// row-major (out x in) followed by its bias (out).
class VaeModel {
 public:
  // All parameters zero.
  VaeModel(Architecture arch, double beta);
  // He-uniform weights for rectifier layers, Glorot-uniform for the heads
  // and the output layer, zero biases.
  static VaeModel initialized(Architecture arch, double beta, std::uint64_t seed);

  const Architecture& architecture() const { return arch_; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  double beta() const { return beta_; }
  void set_beta(double beta);
  std::size_t latent_dim() const { return arch_.latent_dim; }
  std::size_t input_dim() const { return arch_.input_dim; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + std::size_t{layers_[layer].in} * layers_[layer].out;
  }

  // Finite parameters, beta >= 0.
  void validate() const;

 private:
  Architecture arch_;
  std::vector<LayerShape> layers_;
  std::vector<std::size_t> offsets_;
  double beta_;
  // Aligned so vectorised kernels see the same layout on every allocation.
  std::vector<double, Eigen::aligned_allocator<double>> params_;
};

struct LatentCode {
  std::vector<double> mu;
  std::vector<double> logvar;  // clamped to [kLogvarMin, kLogvarMax]
  std::optional<std::vector<double>> sample;
};

struct LossTerms {
  double total = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

// `input` must hold input_dim values in [0, 1]; throws ArgumentError otherwise.
LatentCode encode(const VaeModel& model, std::span<const float> input);
// mu + exp(logvar / 2) * noise
std::vector<double> reparameterize(const LatentCode& code, std::span<const double> noise);
// Logistic outputs, clamped to [2^-53, 1 - 2^-53] so they stay inside (0, 1).
std::vector<double> decode(const VaeModel& model, std::span<const double> z);
// Closed-form KL(N(mu, exp(logvar)) || N(0, I)).
double kl_divergence(const LatentCode& code);

// recon = sum (decode(z) - x)^2 with z = reparameterize(encode(x), noise);
// total = recon + beta * kl.
LossTerms loss(const VaeModel& model, std::span<const float> input, std::span<const double> noise);
// Exact gradient of `loss(...).total` with respect to every parameter, laid
// out like VaeModel::parameters().
std::vector<double> backward(const VaeModel& model, std::span<const float> input,
                             std::span<const double> noise, LossTerms* terms = nullptr);

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 128;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Workers for the per-batch gradient. The batch is always split into the
  // same fixed shards and summed in shard order, so results do not depend
  // on this value.
  unsigned threads = 1;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double total = 0.0;     // means over the epoch's samples
  double recon = 0.0;
  double kl = 0.0;
  double min_kl = 0.0;    // smallest per-sample KL seen in the epoch
};

struct StepStats {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  LossTerms mean;
  double min_kl = 0.0;
};

struct TrainResult {
  VaeModel model;
  std::vector<EpochStats> trace;
  std::vector<StepStats> steps;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Minibatch Adam on the mean per-sample loss. Samples are reshuffled every
// epoch from `config.seed`, which also drives the reparameterisation noise.
// Throws NumericalError naming the epoch and batch if a loss is non-finite.
TrainResult train(VaeModel model, std::span<const std::vector<float>> samples,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

// Posterior means, computed in fixed batches of kLatentChunk samples.
inline constexpr std::size_t kLatentChunk = 256;
std::vector<std::vector<double>> extract_latents(const VaeModel& model,
                                                 std::span<const std::vector<float>> samples,
                                                 unsigned threads = 1);

std::vector<float> patch_input(const ObjectPatch& patch);

// OAVM checkpoint, little-endian:
//   "OAVM" | u32 version=1 | u32 layer_count | layer_count x (u32 in, u32 out, u32 activation) |
//   f64 beta | u32 latent_dim | u64 parameter_count | parameter_count x binary64
std::vector<std::uint8_t> encode_checkpoint(const VaeModel& model);
VaeModel decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const VaeModel& model, const std::filesystem::path& path);
VaeModel load_checkpoint(const std::filesystem::path& path);

// CSV with header "epoch,total,recon,kl".
std::string loss_trace_csv(const std::vector<EpochStats>& trace);

}  // namespace oadino::vae

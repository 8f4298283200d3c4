#include <cmath>

#include "oadino/error.hpp"
#include "oadino/util/rng.hpp"
#include "oadino/vae/vae.hpp"

namespace oadino::vae {

std::vector<LayerShape> Architecture::layers() const {
  if (input_dim == 0 || latent_dim == 0) throw ArgumentError("architecture dimensions must be positive");
  for (auto h : hidden) {
    if (h == 0) throw ArgumentError("hidden layer width must be positive");
  }
  auto u32 = [](std::size_t v) { return static_cast<std::uint32_t>(v); };
  std::vector<LayerShape> out;
  std::size_t prev = input_dim;
  for (auto h : hidden) {
    out.push_back({u32(prev), u32(h), Activation::Relu});
    prev = h;
  }
  out.push_back({u32(prev), u32(latent_dim), Activation::Identity});
  out.push_back({u32(prev), u32(latent_dim), Activation::Identity});
  prev = latent_dim;
  for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) {
    out.push_back({u32(prev), u32(*it), Activation::Relu});
    prev = *it;
  }
  out.push_back({u32(prev), u32(input_dim), Activation::Sigmoid});
  return out;
}

std::size_t Architecture::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers()) n += std::size_t{l.in} * l.out + l.out;
  return n;
}

Architecture Architecture::from_layers(const std::vector<LayerShape>& layers) {
  if (layers.size() < 3 || layers.size() % 2 == 0) {
    throw FormatError("layer table of size " + std::to_string(layers.size()) + " is not an encoder/decoder chain");
  }
  Architecture arch;
  const std::size_t n_hidden = (layers.size() - 3) / 2;
  arch.input_dim = layers.front().in;
  arch.latent_dim = layers[n_hidden].out;
  arch.hidden.clear();
  for (std::size_t i = 0; i < n_hidden; ++i) arch.hidden.push_back(layers[i].out);
  if (arch.layers() != layers) throw FormatError("layer table is not a consistent encoder/decoder chain");
  return arch;
}

VaeModel::VaeModel(Architecture arch, double beta)
    : arch_(std::move(arch)), layers_(arch_.layers()), beta_(beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ArgumentError("beta must be finite and >= 0");
  std::size_t offset = 0;
  for (const auto& l : layers_) {
    offsets_.push_back(offset);
    offset += std::size_t{l.in} * l.out + l.out;
  }
  params_.assign(offset, 0.0);
}

VaeModel VaeModel::initialized(Architecture arch, double beta, std::uint64_t seed) {
  VaeModel model(std::move(arch), beta);
  Rng rng(seed);
  for (std::size_t i = 0; i < model.layers_.size(); ++i) {
    const auto& l = model.layers_[i];
    const double fan_in = l.in, fan_out = l.out;
    const double limit = l.activation == Activation::Relu ? std::sqrt(6.0 / fan_in)
                                                          : std::sqrt(6.0 / (fan_in + fan_out));
    double* w = model.params_.data() + model.offsets_[i];
    for (std::size_t k = 0; k < std::size_t{l.in} * l.out; ++k) w[k] = rng.uniform(-limit, limit);
  }
  return model;
}

void VaeModel::set_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ArgumentError("beta must be finite and >= 0");
  beta_ = beta;
}

void VaeModel::validate() const {
  if (!(beta_ >= 0.0)) throw ArgumentError("beta must be >= 0");
  for (double p : params_) {
    if (!std::isfinite(p)) throw NumericalError("model has a non-finite parameter");
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ArgumentError("learning_rate must be finite and non-negative");
  }
  if (batch_size == 0) throw ArgumentError("batch_size must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    throw ArgumentError("invalid optimizer moment constants");
  }
}

std::vector<float> patch_input(const ObjectPatch& patch) {
  patch.validate();
  return patch.pixels;
}

}  // namespace oadino::vae

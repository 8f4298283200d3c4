#include <algorithm>
#include <cmath>

#include "network.hpp"
#include "oadino/error.hpp"

namespace oadino::vae {

namespace detail {

namespace {

using RowMatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MutRowMap = Eigen::Map<RowMatrixD>;

constexpr double kOutLo = 0x1.0p-53;
constexpr double kOutHi = 1.0 - 0x1.0p-53;

Eigen::MatrixXd affine(const VaeModel& model, std::size_t layer, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd pre = weights(model, layer) * x;
  pre.colwise() += bias(model, layer);
  return pre;
}

void relu_inplace(Eigen::MatrixXd& m) { m = m.cwiseMax(0.0); }

}  // namespace

RowMap weights(const VaeModel& model, std::size_t layer) {
  const auto& l = model.layers()[layer];
  return RowMap(model.parameters().data() + model.weight_offset(layer), l.out, l.in);
}

VecMap bias(const VaeModel& model, std::size_t layer) {
  const auto& l = model.layers()[layer];
  return VecMap(model.parameters().data() + model.bias_offset(layer), l.out);
}

void encode_batch(const VaeModel& model, const Eigen::MatrixXd& input, ForwardCache& cache) {
  const auto& arch = model.architecture();
  cache.encoder.resize(arch.hidden.size() + 1);
  cache.encoder[0] = input;
  for (std::size_t i = 0; i < arch.hidden.size(); ++i) {
    cache.encoder[i + 1] = affine(model, i, cache.encoder[i]);
    relu_inplace(cache.encoder[i + 1]);
  }
  const auto& top = cache.encoder.back();
  cache.mu = affine(model, arch.mu_layer(), top);
  cache.logvar_raw = affine(model, arch.logvar_layer(), top);
  cache.logvar = cache.logvar_raw.cwiseMax(kLogvarMin).cwiseMin(kLogvarMax);
}

Eigen::MatrixXd decode_batch(const VaeModel& model, const Eigen::MatrixXd& z,
                             std::vector<Eigen::MatrixXd>* hidden) {
  const auto& arch = model.architecture();
  Eigen::MatrixXd a = z;
  if (hidden) hidden->clear();
  for (std::size_t i = 0; i < arch.hidden.size(); ++i) {
    a = affine(model, arch.decoder_begin() + i, a);
    relu_inplace(a);
    if (hidden) hidden->push_back(a);
  }
  Eigen::MatrixXd out = affine(model, arch.output_layer(), a);
  out = out.unaryExpr([](double v) { return std::clamp(1.0 / (1.0 + std::exp(-v)), kOutLo, kOutHi); });
  return out;
}

void forward(const VaeModel& model, const Eigen::MatrixXd& input, const Eigen::MatrixXd& noise,
             ForwardCache& cache) {
  encode_batch(model, input, cache);
  cache.noise = noise;
  if (noise.size() == 0) {
    cache.z = cache.mu;
  } else {
    cache.z = cache.mu.array() + (0.5 * cache.logvar.array()).exp() * noise.array();
  }
  cache.output = decode_batch(model, cache.z, &cache.decoder);
}

Eigen::VectorXd recon_terms(const ForwardCache& cache) {
  return (cache.output - cache.encoder[0]).colwise().squaredNorm().transpose();
}

Eigen::VectorXd kl_terms(const ForwardCache& cache) {
  // expm1(lv) - lv keeps each term nonnegative after rounding.
  const Eigen::ArrayXXd lv = cache.logvar.array();
  const Eigen::ArrayXXd gap = lv.unaryExpr([](double v) { return std::expm1(v) - v; });
  return (0.5 * (cache.mu.array().square() + gap)).matrix().colwise().sum().transpose();
}

void accumulate_gradient(const VaeModel& model, const ForwardCache& cache, Eigen::Ref<Eigen::VectorXd> grad) {
  const auto& arch = model.architecture();
  const double beta = model.beta();
  double* g = grad.data();

  auto add_layer = [&](std::size_t layer, const Eigen::MatrixXd& delta, const Eigen::MatrixXd& input) {
    const auto& l = model.layers()[layer];
    MutRowMap gw(g + model.weight_offset(layer), l.out, l.in);
    gw.noalias() += delta * input.transpose();
    Eigen::Map<Eigen::VectorXd> gb(g + model.bias_offset(layer), l.out);
    gb += delta.rowwise().sum();
  };
  auto relu_mask = [](const Eigen::MatrixXd& activation) {
    return (activation.array() > 0.0).cast<double>().matrix();
  };

  // d(recon)/d(pre-sigmoid)
  const auto& x = cache.encoder[0];
  const auto& y = cache.output;
  Eigen::MatrixXd delta = (2.0 * (y - x).array() * y.array() * (1.0 - y.array())).matrix();

  // Decoder, top down. The input of decoder hidden layer i is decoder[i-1]
  // (or z for i = 0); the output layer reads decoder.back() (or z).
  const std::size_t n_hidden = arch.hidden.size();
  {
    const Eigen::MatrixXd& below = n_hidden == 0 ? cache.z : cache.decoder.back();
    add_layer(arch.output_layer(), delta, below);
    delta = weights(model, arch.output_layer()).transpose() * delta;
  }
  for (std::size_t k = n_hidden; k-- > 0;) {
    delta = delta.cwiseProduct(relu_mask(cache.decoder[k]));
    const Eigen::MatrixXd& below = k == 0 ? cache.z : cache.decoder[k - 1];
    const std::size_t layer = arch.decoder_begin() + k;
    add_layer(layer, delta, below);
    delta = weights(model, layer).transpose() * delta;
  }
  // delta now holds d(recon)/dz.

  Eigen::MatrixXd d_mu = delta + beta * cache.mu;
  Eigen::ArrayXXd d_lv = 0.5 * beta * (cache.logvar.array().exp() - 1.0);
  if (cache.noise.size() != 0) {
    d_lv += delta.array() * cache.noise.array() * 0.5 * (0.5 * cache.logvar.array()).exp();
  }
  const Eigen::ArrayXXd pass =
      ((cache.logvar_raw.array() >= kLogvarMin) && (cache.logvar_raw.array() <= kLogvarMax)).cast<double>();
  const Eigen::MatrixXd d_lv_raw = (d_lv * pass).matrix();

  const Eigen::MatrixXd& top = cache.encoder.back();
  add_layer(arch.mu_layer(), d_mu, top);
  add_layer(arch.logvar_layer(), d_lv_raw, top);
  if (n_hidden == 0) return;
  delta = weights(model, arch.mu_layer()).transpose() * d_mu +
          weights(model, arch.logvar_layer()).transpose() * d_lv_raw;
  for (std::size_t k = n_hidden; k-- > 0;) {
    delta = delta.cwiseProduct(relu_mask(cache.encoder[k + 1]));
    add_layer(k, delta, cache.encoder[k]);
    if (k > 0) delta = weights(model, k).transpose() * delta;
  }
}

Eigen::MatrixXd to_matrix(std::span<const std::vector<float>> samples, std::size_t begin,
                          std::size_t count, std::size_t dim) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    const auto& s = samples[begin + j];
    if (s.size() != dim) {
      throw ArgumentError("sample has " + std::to_string(s.size()) + " values, model expects " +
                          std::to_string(dim));
    }
    for (std::size_t i = 0; i < dim; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[i];
  }
  return m;
}

}  // namespace detail

namespace {

Eigen::MatrixXd single_input(const VaeModel& model, std::span<const float> input) {
  if (input.size() != model.input_dim()) {
    throw ArgumentError("input has " + std::to_string(input.size()) + " values, model expects " +
                        std::to_string(model.input_dim()));
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(input.size()), 1);
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!(input[i] >= 0.0f && input[i] <= 1.0f)) throw ArgumentError("input value outside [0,1]");
    x(static_cast<Eigen::Index>(i), 0) = input[i];
  }
  return x;
}

Eigen::MatrixXd single_noise(const VaeModel& model, std::span<const double> noise) {
  if (noise.size() != model.latent_dim()) throw ArgumentError("noise length must equal the latent size");
  return Eigen::Map<const Eigen::MatrixXd>(noise.data(), static_cast<Eigen::Index>(noise.size()), 1);
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c = 0) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, c);
  return out;
}

}  // namespace

LatentCode encode(const VaeModel& model, std::span<const float> input) {
  detail::ForwardCache cache;
  detail::encode_batch(model, single_input(model, input), cache);
  return {column(cache.mu), column(cache.logvar), std::nullopt};
}

std::vector<double> reparameterize(const LatentCode& code, std::span<const double> noise) {
  if (noise.size() != code.mu.size() || code.logvar.size() != code.mu.size()) {
    throw ArgumentError("noise length must equal the latent size");
  }
  std::vector<double> z(code.mu.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = code.mu[i] + std::exp(0.5 * code.logvar[i]) * noise[i];
  return z;
}

std::vector<double> decode(const VaeModel& model, std::span<const double> z) {
  if (z.size() != model.latent_dim()) throw ArgumentError("latent length must equal the latent size");
  for (double v : z) {
    if (!std::isfinite(v)) throw ArgumentError("latent must be finite");
  }
  const Eigen::MatrixXd zm = Eigen::Map<const Eigen::MatrixXd>(z.data(), static_cast<Eigen::Index>(z.size()), 1);
  return column(detail::decode_batch(model, zm));
}

double kl_divergence(const LatentCode& code) {
  double kl = 0.0;
  for (std::size_t i = 0; i < code.mu.size(); ++i) {
    kl += 0.5 * (code.mu[i] * code.mu[i] + (std::expm1(code.logvar[i]) - code.logvar[i]));
  }
  return kl;
}

LossTerms loss(const VaeModel& model, std::span<const float> input, std::span<const double> noise) {
  detail::ForwardCache cache;
  detail::forward(model, single_input(model, input), single_noise(model, noise), cache);
  LossTerms t;
  t.recon = detail::recon_terms(cache)[0];
  t.kl = detail::kl_terms(cache)[0];
  t.total = t.recon + model.beta() * t.kl;
  return t;
}

std::vector<double> backward(const VaeModel& model, std::span<const float> input,
                             std::span<const double> noise, LossTerms* terms) {
  detail::ForwardCache cache;
  detail::forward(model, single_input(model, input), single_noise(model, noise), cache);
  if (terms) {
    terms->recon = detail::recon_terms(cache)[0];
    terms->kl = detail::kl_terms(cache)[0];
    terms->total = terms->recon + model.beta() * terms->kl;
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.parameters().size()));
  detail::accumulate_gradient(model, cache, grad);
  return {grad.data(), grad.data() + grad.size()};
}

}  // namespace oadino::vae

#include <cmath>
#include <cstdio>

#include "oadino/error.hpp"
#include "oadino/util/binary_io.hpp"
#include "oadino/vae/vae.hpp"

namespace oadino::vae {

namespace {
constexpr std::uint32_t kCheckpointVersion = 1;
}

std::vector<std::uint8_t> encode_checkpoint(const VaeModel& model) {
  model.validate();
  io::ByteWriter w;
  w.magic("OAVM");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(model.layers().size()));
  for (const auto& l : model.layers()) {
    w.u32(l.in);
    w.u32(l.out);
    w.u32(static_cast<std::uint32_t>(l.activation));
  }
  w.f64(model.beta());
  w.u32(static_cast<std::uint32_t>(model.latent_dim()));
  w.u64(model.parameters().size());
  for (double p : model.parameters()) w.f64(p);
  return w.take();
}

VaeModel decode_checkpoint(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "OAVM");
  r.expect_magic("OAVM");
  const auto version = r.u32();
  if (version != kCheckpointVersion) r.fail("unsupported version " + std::to_string(version));
  const auto n_layers = r.u32();
  if (n_layers > 1024) r.fail("implausible layer count " + std::to_string(n_layers));
  std::vector<LayerShape> layers(n_layers);
  for (auto& l : layers) {
    l.in = r.u32();
    l.out = r.u32();
    const auto act = r.u32();
    if (act > 2) r.fail("unknown activation " + std::to_string(act));
    l.activation = static_cast<Activation>(act);
  }
  const double beta = r.f64();
  const auto latent = r.u32();
  const auto count = r.u64();

  Architecture arch;
  try {
    arch = Architecture::from_layers(layers);
  } catch (const Error& e) {
    r.fail(e.what());
  }
  if (arch.latent_dim != latent) r.fail("latent size does not match the layer table");
  if (!(beta >= 0.0) || !std::isfinite(beta)) r.fail("invalid beta");
  VaeModel model(arch, beta);
  if (count != model.parameters().size()) {
    r.fail("parameter count " + std::to_string(count) + " does not match the layer table (" +
           std::to_string(model.parameters().size()) + ")");
  }
  if (r.remaining() != count * 8) r.fail("payload size mismatch");
  for (auto& p : model.parameters()) {
    p = r.f64();
    if (!std::isfinite(p)) r.fail("non-finite parameter");
  }
  return model;
}

void save_checkpoint(const VaeModel& model, const std::filesystem::path& path) {
  io::write_file(path, encode_checkpoint(model));
}

VaeModel load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return decode_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string loss_trace_csv(const std::vector<EpochStats>& trace) {
  std::string out = "epoch,total,recon,kl\n";
  char buf[160];
  for (const auto& e : trace) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e.epoch, e.total, e.recon, e.kl);
    out += buf;
  }
  return out;
}

}  // namespace oadino::vae

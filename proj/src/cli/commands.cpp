#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>

#include "json.hpp"
#include "oadino/corpus/annotation.hpp"
#include "oadino/corpus/image.hpp"
#include "oadino/corpus/manifest.hpp"
#include "oadino/corpus/oadf.hpp"
#include "oadino/error.hpp"
#include "oadino/eval/eval.hpp"
#include "oadino/segment/segmenter.hpp"
#include "oadino/similarity/similarity.hpp"
#include "oadino/synthetic/synthetic.hpp"
#include "oadino/util/binary_io.hpp"
#include "oadino/util/parallel.hpp"
#include "oadino/util/rng.hpp"
#include "oadino/vae/vae.hpp"

namespace oadino::cli {

namespace {

using Json = nlohmann::ordered_json;

void info(const Common& c, const std::string& msg) {
  if (c.verbose) std::cerr << msg << "\n";
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

Manifest load_nonempty(const fs::path& path) {
  Manifest m = load_manifest(path, true);
  if (m.entries.empty()) throw FormatError(path.string() + ": empty manifest");
  return m;
}

fs::path mask_path(const fs::path& dir, const std::string& id) { return dir / (id + ".oamk"); }
fs::path oadf_path(const fs::path& dir, const std::string& id) { return dir / (id + ".oadf"); }

ForegroundMask load_mask_for(const fs::path& dir, const std::string& id) {
  const auto path = mask_path(dir, id);
  if (!fs::exists(path)) throw ConfigError("no mask for image " + id + " in " + dir.string());
  ForegroundMask m = read_mask(path);
  m.image_id = id;
  return m;
}

Image load_image_for(const Manifest& m, const ManifestEntry& e) {
  Image img = read_ppm(m.image_file(e));
  img.id = e.image_id;
  return img;
}

std::vector<std::vector<float>> patches_to_samples(const std::vector<ObjectPatch>& patches) {
  std::vector<std::vector<float>> out;
  out.reserve(patches.size());
  for (const auto& p : patches) out.push_back(p.pixels);
  return out;
}

PatchEmbeddingSet samples_to_oadf(const std::string& id, const std::vector<ObjectPatch>& patches) {
  PatchEmbeddingSet set;
  set.image_id = id;
  set.grid_h = static_cast<std::uint32_t>(patches.size());
  set.grid_w = 1;
  set.dim = static_cast<std::uint32_t>(ObjectPatch::kValues);
  set.values.reserve(patches.size() * ObjectPatch::kValues);
  for (const auto& p : patches) set.values.insert(set.values.end(), p.pixels.begin(), p.pixels.end());
  return set;
}

std::vector<std::vector<float>> oadf_to_samples(const PatchEmbeddingSet& set) {
  std::vector<std::vector<float>> out;
  for (std::size_t i = 0; i < set.patch_count(); ++i) {
    const auto row = set.row(i);
    out.emplace_back(row.begin(), row.end());
  }
  return out;
}

struct RepDir {
  std::string mode;
  std::uint32_t n_g = 0;
  std::uint32_t n_z = 0;
};

RepDir read_rep_meta(const fs::path& dir) {
  const auto path = dir / "embedding.json";
  if (!fs::exists(path)) throw ConfigError(dir.string() + " has no embedding.json; run embed first");
  const auto j = Json::parse(io::read_text(path));
  return {j.at("mode").get<std::string>(), j.at("n_g").get<std::uint32_t>(), j.at("n_z").get<std::uint32_t>()};
}

// Representations for the manifest's ids; ids without a file (no foreground)
// are skipped with a warning.
std::map<std::string, JointRepresentation> load_reps(const fs::path& dir, const RepDir& meta, const Manifest& m) {
  std::map<std::string, JointRepresentation> out;
  for (const auto& e : m.entries) {
    const auto path = oadf_path(dir, e.image_id);
    if (!fs::exists(path)) {
      warn("no representation for " + e.image_id + "; excluded");
      continue;
    }
    auto set = read_embeddings(path);
    set.image_id = e.image_id;
    auto rep = joint_from_oadf(set, meta.n_g);
    if (rep.n_z != meta.n_z) throw FormatError(path.string() + ": width disagrees with embedding.json");
    out.emplace(e.image_id, std::move(rep));
  }
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void gen_synthetic(const GenSyntheticOptions& o, const Common& c) {
  synth::SynthConfig cfg;
  cfg.seed = o.seed;
  cfg.n_images = o.n;
  cfg.grid_h = cfg.grid_w = o.grid;
  cfg.patch_px = o.patch_px;
  cfg.dim = o.dim;
  cfg.objects_min = o.objects_min;
  cfg.objects_max = o.objects_max;
  cfg.w_colour = o.colour_weight;
  cfg.w_shape = cfg.w_size = cfg.w_material = o.geometry_weight;
  cfg.background_marker = o.marker;
  cfg.noise = o.noise;
  cfg.validate();
  auto splits = synth::default_splits(o.n);
  if (o.train >= 0) splits.train = static_cast<std::size_t>(o.train);
  if (o.queries >= 0) splits.query = static_cast<std::size_t>(o.queries);
  if (splits.train + splits.query > o.n) throw ArgumentError("train + queries exceeds --n");
  splits.candidates = o.n - splits.train - splits.query;
  info(c, "generating " + std::to_string(o.n) + " scenes into " + o.out.string());
  synth::write_corpus(cfg, splits, o.out, resolve_threads(c.threads));
  Json j;
  j["seed"] = cfg.seed;
  j["n_images"] = cfg.n_images;
  j["grid"] = {cfg.grid_h, cfg.grid_w};
  j["patch_px"] = cfg.patch_px;
  j["dim"] = cfg.dim;
  j["objects_per_image"] = {cfg.objects_min, cfg.objects_max};
  j["weights"] = {{"shape", cfg.w_shape}, {"size", cfg.w_size}, {"material", cfg.w_material}, {"colour", cfg.w_colour}};
  j["background_marker"] = cfg.background_marker;
  j["noise"] = cfg.noise;
  j["splits"] = {{"train", splits.train}, {"validation-query", splits.query}, {"candidates", splits.candidates}};
  io::write_text(o.out / "synthetic.json", j.dump(2) + "\n");
}

void import_files(const ImportOptions& o, const Common& c) {
  const Split split = split_from_name(o.split);
  if (!fs::is_directory(o.images)) throw ConfigError("not a directory: " + o.images.string());
  if (!fs::is_directory(o.embeddings)) throw ConfigError("not a directory: " + o.embeddings.string());
  std::map<std::string, SceneAnnotation> annotations;
  if (!o.annotations.empty()) {
    for (auto& a : read_annotations(o.annotations)) annotations.emplace(a.image_id, a);
  }
  std::vector<std::string> ids;
  for (const auto& f : fs::directory_iterator(o.images)) {
    if (f.path().extension() == ".ppm") ids.push_back(f.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  const fs::path base = fs::absolute(o.out).parent_path();
  Manifest m{split, {}, base};
  for (const auto& id : ids) {
    const auto emb = oadf_path(o.embeddings, id);
    if (!fs::exists(emb)) {
      warn("image " + id + " has no embedding file; skipped");
      continue;
    }
    // Headers are checked now so bad exports fail at import time.
    const auto set = read_embeddings(emb);
    set.validate();
    ManifestEntry e;
    e.image_id = id;
    e.image_path = fs::absolute(o.images / (id + ".ppm")).lexically_relative(base).generic_string();
    e.embedding_path = fs::absolute(emb).lexically_relative(base).generic_string();
    if (!o.globals.empty()) {
      const auto g = oadf_path(o.globals, id);
      if (!fs::exists(g)) throw ConfigError("missing global feature for " + id);
      read_global(g).validate();
      e.global_feature_path = fs::absolute(g).lexically_relative(base).generic_string();
    }
    if (auto it = annotations.find(id); it != annotations.end()) e.annotation = it->second;
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty()) throw FormatError("no importable images in " + o.images.string());
  save_manifest(m, o.out);
  info(c, "wrote " + std::to_string(m.entries.size()) + " entries to " + o.out.string());
}

void segment(const SegmentOptions& o, const Common& c) {
  if (o.t == 0) throw ArgumentError("--t must be >= 1");
  const unsigned threads = resolve_threads(c.threads);
  std::vector<Manifest> manifests;
  for (const auto& p : o.manifests) manifests.push_back(load_nonempty(p));
  fs::create_directories(o.out / "masks");
  fs::create_directories(o.out / "masks_first");
  if (o.visualize) fs::create_directories(o.out / "masks_vis");

  Json summary = Json::array();
  for (std::size_t mi = 0; mi < manifests.size(); ++mi) {
    const auto& m = manifests[mi];
    const auto batches = partition_batches(m.entries.size(), o.t);
    std::vector<Json> batch_info(batches.size());
    parallel_for(batches.size(), threads, [&](std::size_t b) {
      std::vector<PatchEmbeddingSet> sets;
      for (auto i : batches[b]) {
        auto s = read_embeddings(m.embedding_file(m.entries[i]));
        s.image_id = m.entries[i].image_id;
        sets.push_back(std::move(s));
      }
      const auto first = first_pass_mask(sets);
      std::vector<ForegroundMask> final_masks;
      bool refined = true;
      std::string note;
      try {
        final_masks = second_pass_refine(sets, first.basis, first.masks).masks;
      } catch (const RefinementError& e) {
        refined = false;
        note = e.what();
        final_masks = first.masks;
      }
      for (std::size_t j = 0; j < sets.size(); ++j) {
        write_mask(first.masks[j], mask_path(o.out / "masks_first", sets[j].image_id));
        write_mask(final_masks[j], mask_path(o.out / "masks", sets[j].image_id));
        if (o.visualize) {
          write_ppm(mask_visualization(final_masks[j]), o.out / "masks_vis" / (sets[j].image_id + ".ppm"));
        }
      }
      Json jb;
      jb["manifest"] = o.manifests[mi].generic_string();
      jb["batch"] = b;
      jb["images"] = sets.size();
      jb["first_image"] = sets.front().image_id;
      jb["refined"] = refined;
      if (!refined) jb["fallback_reason"] = note;
      batch_info[b] = std::move(jb);
    });
    for (auto& jb : batch_info) {
      if (!jb["refined"].get<bool>()) {
        warn("batch " + std::to_string(jb["batch"].get<std::size_t>()) + " kept its first-pass masks");
      }
      summary.push_back(std::move(jb));
    }
    info(c, "segmented " + std::to_string(m.entries.size()) + " images in " + std::to_string(batches.size()) +
                " batches");
  }
  Json j;
  j["t"] = o.t;
  j["batches"] = summary;
  io::write_text(o.out / "segment.json", j.dump(2) + "\n");
}

void extract_patches(const ExtractOptions& o, const Common& c) {
  const unsigned threads = resolve_threads(c.threads);
  fs::create_directories(o.out);
  for (const auto& path : o.manifests) {
    const auto m = load_nonempty(path);
    std::vector<std::uint8_t> empty(m.entries.size(), 0);
    parallel_for(m.entries.size(), threads, [&](std::size_t i) {
      const auto& e = m.entries[i];
      const auto ex = remap_and_extract(load_image_for(m, e), load_mask_for(o.masks, e.image_id));
      if (ex.patches.empty()) {
        empty[i] = 1;
        return;
      }
      write_embeddings(samples_to_oadf(e.image_id, ex.patches), oadf_path(o.out, e.image_id));
    });
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
      if (empty[i]) warn("image " + m.entries[i].image_id + " has no foreground patches");
    }
    info(c, "extracted patches for " + path.string());
  }
}

void mask_apply(const MaskApplyOptions& o, const Common& c) {
  const unsigned threads = resolve_threads(c.threads);
  fs::create_directories(o.out);
  for (const auto& path : o.manifests) {
    const auto m = load_nonempty(path);
    parallel_for(m.entries.size(), threads, [&](std::size_t i) {
      const auto& e = m.entries[i];
      const auto ex = remap_and_extract(load_image_for(m, e), load_mask_for(o.masks, e.image_id));
      write_ppm(ex.masked, o.out / (e.image_id + ".ppm"));
    });
    info(c, "masked images for " + path.string());
  }
}

void train_vae(const TrainOptions& o, const Common& c) {
  if (!fs::is_directory(o.patches)) throw ConfigError("not a directory: " + o.patches.string());
  std::vector<std::string> ids;
  if (!o.manifest.empty()) {
    for (const auto& e : load_nonempty(o.manifest).entries) {
      if (fs::exists(oadf_path(o.patches, e.image_id))) ids.push_back(e.image_id);
    }
  } else {
    for (const auto& f : fs::directory_iterator(o.patches)) {
      if (f.path().extension() == ".oadf") ids.push_back(f.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  std::vector<std::vector<float>> samples;
  std::uint32_t dim = 0;
  for (const auto& id : ids) {
    const auto set = read_embeddings(oadf_path(o.patches, id));
    if (dim == 0) dim = set.dim;
    if (set.dim != dim) throw FormatError("patch tensor " + id + " has width " + std::to_string(set.dim));
    auto s = oadf_to_samples(set);
    samples.insert(samples.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  if (samples.empty()) throw ConfigError("no patches found in " + o.patches.string());
  if (o.max_patches > 0 && samples.size() > o.max_patches) {
    Rng rng(mix_seed(o.seed, 0x7061746368ULL));
    auto keep = rng.sample_without_replacement(samples.size(), o.max_patches);
    std::sort(keep.begin(), keep.end());
    std::vector<std::vector<float>> chosen;
    for (auto i : keep) chosen.push_back(std::move(samples[i]));
    samples = std::move(chosen);
  }

  vae::Architecture arch;
  arch.input_dim = dim;
  arch.latent_dim = o.latent;
  vae::TrainConfig cfg;
  cfg.learning_rate = o.lr;
  cfg.batch_size = o.batch;
  cfg.epochs = o.epochs;
  cfg.seed = o.seed;
  cfg.threads = resolve_threads(c.threads);
  if (!(o.lr > 0.0)) throw ArgumentError("--lr must be > 0");
  cfg.validate();
  info(c, "training on " + std::to_string(samples.size()) + " patches");
  auto model = vae::VaeModel::initialized(arch, o.beta, o.seed);
  auto result = vae::train(std::move(model), samples, cfg, [&](const vae::EpochStats& s) {
    info(c, "epoch " + std::to_string(s.epoch) + " total " + fmt("%.4f", s.total) + " recon " +
                fmt("%.4f", s.recon) + " kl " + fmt("%.4f", s.kl));
  });
  fs::create_directories(o.out);
  vae::save_checkpoint(result.model, o.out / "vae.oavm");
  io::write_text(o.out / "loss_trace.csv", vae::loss_trace_csv(result.trace));
  Json j;
  j["patches"] = samples.size();
  j["images"] = ids.size();
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["beta"] = o.beta;
  j["latent"] = o.latent;
  j["seed"] = o.seed;
  j["final_recon"] = result.trace.empty() ? 0.0 : result.trace.back().recon;
  io::write_text(o.out / "train.json", j.dump(2) + "\n");
}

void embed(const EmbedOptions& o, const Common& c) {
  const unsigned threads = resolve_threads(c.threads);
  const bool joint = o.mode == "joint";
  std::optional<vae::VaeModel> model;
  if (joint) {
    if (o.model.empty()) throw ArgumentError("--model is required in joint mode");
    if (o.patches.empty() == o.masks.empty()) throw ArgumentError("joint mode needs exactly one of --patches, --masks");
    model = vae::load_checkpoint(o.model);
  }
  fs::create_directories(o.out);
  std::optional<std::uint32_t> n_g;
  std::vector<std::string> skipped;
  std::size_t written = 0;
  for (const auto& path : o.manifests) {
    const auto m = load_nonempty(path);
    std::vector<std::optional<JointRepresentation>> reps(m.entries.size());
    std::vector<std::uint32_t> widths(m.entries.size(), 0);
    parallel_for(m.entries.size(), threads, [&](std::size_t i) {
      const auto& e = m.entries[i];
      const auto gpath = m.global_file(e);
      if (!gpath) throw ConfigError("entry " + e.image_id + " has no global_feature_path");
      GlobalFeature g = read_global(*gpath);
      g.image_id = e.image_id;
      widths[i] = static_cast<std::uint32_t>(g.dim());
      if (!joint) {
        reps[i] = global_only(g);
        return;
      }
      std::vector<std::vector<float>> samples;
      if (!o.patches.empty()) {
        const auto p = oadf_path(o.patches, e.image_id);
        if (!fs::exists(p)) return;
        samples = oadf_to_samples(read_embeddings(p));
      } else {
        samples = patches_to_samples(
            remap_and_extract(load_image_for(m, e), load_mask_for(o.masks, e.image_id)).patches);
      }
      if (samples.empty()) return;
      const auto latents = vae::extract_latents(*model, samples);
      reps[i] = build_joint(g, latents);
    });
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
      if (!n_g) n_g = widths[i];
      if (widths[i] != *n_g) throw FormatError("global feature width differs for " + m.entries[i].image_id);
      if (!reps[i]) {
        warn("image " + m.entries[i].image_id + " has no foreground; excluded from retrieval");
        skipped.push_back(m.entries[i].image_id);
        continue;
      }
      write_embeddings(joint_to_oadf(*reps[i]), oadf_path(o.out, m.entries[i].image_id));
      ++written;
    }
  }
  Json j;
  j["mode"] = o.mode;
  j["n_g"] = n_g.value_or(0);
  j["n_z"] = joint ? model->latent_dim() : 0;
  j["images"] = written;
  j["skipped"] = skipped;
  io::write_text(o.out / "embedding.json", j.dump(2) + "\n");
  info(c, "wrote " + std::to_string(written) + " representations");
}

void retrieve(const RetrieveOptions& o, const Common& c) {
  const auto meta = read_rep_meta(o.reps);
  const auto qm = load_nonempty(o.query_manifest);
  const auto cm = load_nonempty(o.candidate_manifest);
  const auto qreps = load_reps(o.reps, meta, qm);
  const auto creps = load_reps(o.reps, meta, cm);
  if (creps.empty()) throw ConfigError("no candidate has a representation");
  std::vector<PreparedRepresentation> cands;
  for (const auto& e : cm.entries) {
    if (auto it = creps.find(e.image_id); it != creps.end()) cands.push_back(prepare(it->second));
  }
  std::vector<std::string> wanted = o.queries;
  if (wanted.empty()) {
    for (const auto& e : qm.entries) wanted.push_back(e.image_id);
  }
  fs::create_directories(o.out);
  const unsigned threads = resolve_threads(c.threads);
  for (const auto& id : wanted) {
    auto it = qreps.find(id);
    if (it == qreps.end()) {
      if (std::none_of(qm.entries.begin(), qm.entries.end(), [&](const auto& e) { return e.image_id == id; })) {
        throw ConfigError("query " + id + " is not in " + o.query_manifest.string());
      }
      continue;  // already warned: no foreground
    }
    const auto ranked = rank_candidates(prepare(it->second), cands, threads);
    io::write_text(o.out / (id + ".csv"), ranked_csv(ranked));
  }
  info(c, "ranked " + std::to_string(wanted.size()) + " queries against " + std::to_string(cands.size()) +
              " candidates");
}

void evaluate(const EvaluateOptions& o, const Common& c) {
  const auto meta = read_rep_meta(o.reps);
  const auto qm = load_nonempty(o.query_manifest);
  const auto cm = load_nonempty(o.candidate_manifest);
  const auto qreps = load_reps(o.reps, meta, qm);
  const auto creps = load_reps(o.reps, meta, cm);
  const unsigned threads = resolve_threads(c.threads);

  auto items = [&](const Manifest& m, const std::map<std::string, JointRepresentation>& reps, bool is_query) {
    std::vector<const ManifestEntry*> kept;
    for (const auto& e : m.entries) {
      if (!e.annotation) throw ConfigError("entry " + e.image_id + " has no annotation");
      if (is_query && !e.annotation->reference_object_index) {
        throw ConfigError("query " + e.image_id + " has no reference_object_index");
      }
      if (reps.count(e.image_id)) kept.push_back(&e);
    }
    std::vector<eval::EvalItem> out(kept.size());
    parallel_for(kept.size(), threads, [&](std::size_t i) {
      const auto& e = *kept[i];
      auto& it = out[i];
      it.id = e.image_id;
      it.annotation = *e.annotation;
      it.annotation.image_id = e.image_id;
      it.representation = prepare(reps.at(e.image_id));
      if (!o.masks.empty()) {
        it.mean_rgb = mean_foreground_rgb(load_image_for(m, e), load_mask_for(o.masks, e.image_id));
      }
    });
    return out;
  };
  const auto queries = items(qm, qreps, true);
  const auto candidates = items(cm, creps, false);
  if (!o.masks.empty()) {
    for (const auto& it : queries) {
      if (!it.mean_rgb) warn("query " + it.id + " has an empty mask; excluded from colour distance");
    }
  }

  std::vector<SceneAnnotation> anns;
  for (const auto& it : queries) anns.push_back(it.annotation);
  for (const auto& it : candidates) anns.push_back(it.annotation);
  const auto schema = eval::schema_of(anns);
  const auto base = eval::parse_subset(o.base);
  std::vector<std::string> names = o.families;
  if (names.empty()) {
    for (const auto& n : eval::default_family_names()) {
      const auto f = eval::family_from_name(n, base);
      bool ok = true;
      for (const auto& s : f.subsets) {
        for (auto a : s) ok = ok && schema.has(a);
      }
      if (ok) names.push_back(n);
    }
  }
  std::vector<eval::SubsetFamily> families;
  for (const auto& n : names) families.push_back(eval::family_from_name(n, base));

  eval::TrialSpec spec;
  spec.n_trials = o.trials;
  spec.queries_per_trial = o.queries;
  spec.candidate_pool_size = o.candidates;
  spec.k = o.k;
  spec.seed = o.seed;
  info(c, "evaluating " + std::to_string(queries.size()) + " queries against " + std::to_string(candidates.size()) +
              " candidates");
  auto rep = eval::run_trials(queries, candidates, spec, families, threads);
  rep.representation = meta.mode;
  rep.query_source = o.query_manifest.generic_string();
  rep.candidate_source = o.candidate_manifest.generic_string();

  fs::create_directories(o.out);
  io::write_text(o.out / "report.json", eval::report_json(rep));
  io::write_text(o.out / "report.csv", eval::report_csv(rep));

  if (o.contact_sheets > 0 && !rep.trials.empty()) {
    fs::create_directories(o.out / "contact");
    std::map<std::string, const ManifestEntry*> cand_entry;
    for (const auto& e : cm.entries) cand_entry[e.image_id] = &e;
    std::map<std::string, const ManifestEntry*> query_entry;
    for (const auto& e : qm.entries) query_entry[e.image_id] = &e;
    const auto& t0 = rep.trials.front();
    const std::size_t n = std::min(o.contact_sheets, t0.top_k.size());
    for (std::size_t j = 0; j < n; ++j) {
      const auto& list = t0.top_k[j];
      std::vector<Image> shown;
      for (const auto& e : list.entries) shown.push_back(load_image_for(cm, *cand_entry.at(e.candidate_id)));
      const auto sheet = eval::contact_sheet(load_image_for(qm, *query_entry.at(list.query_id)), shown);
      char prefix[32];
      std::snprintf(prefix, sizeof prefix, "trial0_q%02zu_", j);
      write_ppm(sheet, o.out / "contact" / (prefix + list.query_id + ".ppm"));
    }
  }
  info(c, "wrote " + (o.out / "report.json").string());
}

void report(const ReportOptions& o, const Common&) {
  auto load = [](const fs::path& p) {
    const auto j = Json::parse(io::read_text(p));
    if (j.value("format", "") != "oadino-report") throw FormatError(p.string() + ": not an evaluation report");
    return j;
  };
  const auto main = load(o.report);
  std::optional<Json> base;
  if (!o.baseline.empty()) base = load(o.baseline);

  auto find_family = [](const Json& rep, const std::string& name) -> const Json* {
    for (const auto& f : rep.at("summary")) {
      if (f.at("family").get<std::string>() == name) return &f;
    }
    return nullptr;
  };
  const auto& md = main.at("metadata");
  if (o.format == "csv") {
    std::cout << "family,metric,mean,std" << (base ? ",baseline_mean,baseline_std,delta" : "") << "\n";
  } else {
    std::cout << "representation " << md.at("representation").get<std::string>() << ", "
              << md.at("trials").get<std::size_t>() << " trials x " << md.at("queries_per_trial").get<std::size_t>()
              << " queries vs " << md.at("candidate_pool_size").get<std::size_t>() << " candidates, k="
              << md.at("k").get<std::size_t>() << ", seed " << md.at("seed").get<std::uint64_t>() << "\n";
    if (base) std::cout << "baseline: " << base->at("metadata").at("representation").get<std::string>() << "\n";
  }
  for (const auto& f : main.at("summary")) {
    const auto name = f.at("family").get<std::string>();
    const Json* bf = base ? find_family(*base, name) : nullptr;
    for (const char* metric : {"top_k_precision", "weighted_precision", "error_rate"}) {
      const double mean = f.at(metric).at("mean").get<double>();
      const double sd = f.at(metric).at("std").get<double>();
      if (o.format == "csv") {
        std::cout << name << "," << metric << "," << fmt("%.6f", mean) << "," << fmt("%.6f", sd);
        if (base) {
          if (bf) {
            const double bm = bf->at(metric).at("mean").get<double>();
            std::cout << "," << fmt("%.6f", bm) << "," << fmt("%.6f", bf->at(metric).at("std").get<double>()) << ","
                      << fmt("%.6f", mean - bm);
          } else {
            std::cout << ",,,";
          }
        }
        std::cout << "\n";
      } else {
        std::string line = name + std::string(std::max<std::size_t>(1, 6 - name.size()), ' ') + metric;
        line += std::string(std::max<std::size_t>(1, 20 - std::string(metric).size()), ' ');
        line += fmt("%6.1f", 100.0 * mean) + " +/- " + fmt("%4.1f", 100.0 * sd);
        if (bf) {
          const double bm = bf->at(metric).at("mean").get<double>();
          line += "   baseline " + fmt("%6.1f", 100.0 * bm) + "   delta " + fmt("%+6.1f", 100.0 * (mean - bm));
        }
        std::cout << line << "\n";
      }
    }
  }
  if (o.format == "text" && !main.at("colour_distance").is_null()) {
    std::cout << "colour_distance " << fmt("%.4f", main.at("colour_distance").at("mean").get<double>()) << " +/- "
              << fmt("%.4f", main.at("colour_distance").at("std").get<double>()) << "\n";
  }
}

}  // namespace oadino::cli

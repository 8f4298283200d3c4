#include <algorithm>

#include "oadino/corpus/manifest.hpp"
#include "oadino/error.hpp"
#include "oadino/synthetic/synthetic.hpp"
#include "oadino/util/parallel.hpp"

namespace oadino::synth {

namespace fs = std::filesystem;

void write_corpus(const SynthConfig& config, const SplitSizes& splits, const fs::path& out, unsigned threads) {
  config.validate();
  if (splits.train + splits.query + splits.candidates != config.n_images) {
    throw ArgumentError("split sizes " + std::to_string(splits.train) + "+" + std::to_string(splits.query) + "+" +
                        std::to_string(splits.candidates) + " do not add up to " + std::to_string(config.n_images));
  }
  for (const char* sub : {"images", "embeddings", "globals", "globals_masked", "masks_truth"}) {
    fs::create_directories(out / sub);
  }

  Manifest train{Split::Train, {}, out};
  Manifest query{Split::ValidationQuery, {}, out};
  Manifest cands{Split::Candidates, {}, out};
  std::vector<SceneAnnotation> annotations;

  constexpr std::size_t kChunk = 64;
  for (std::size_t begin = 0; begin < config.n_images; begin += kChunk) {
    const std::size_t count = std::min(kChunk, config.n_images - begin);
    std::vector<SynthScene> scenes(count);
    parallel_for(count, threads, [&](std::size_t j) {
      auto& s = scenes[j];
      s = generate_scene(config, begin + j);
      const std::string& id = s.annotation.image_id;
      write_ppm(s.image, out / "images" / (id + ".ppm"));
      write_embeddings(s.embeddings, out / "embeddings" / (id + ".oadf"));
      write_global(s.global_raw, out / "globals" / (id + ".oadf"));
      write_global(s.global_masked, out / "globals_masked" / (id + ".oadf"));
      write_mask(s.truth, out / "masks_truth" / (id + ".oamk"));
    });
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t i = begin + j;
      auto ann = scenes[j].annotation;
      const std::string id = ann.image_id;
      Manifest* target = &cands;
      if (i < splits.train) {
        target = &train;
      } else if (i < splits.train + splits.query) {
        target = &query;
      }
      if (target != &query) ann.reference_object_index.reset();
      annotations.push_back(ann);
      target->entries.push_back({id, "images/" + id + ".ppm", "embeddings/" + id + ".oadf",
                                 "globals_masked/" + id + ".oadf", ann});
    }
  }
  write_annotations(annotations, out / "annotations.jsonl");
  save_manifest(train, out / "train.jsonl");
  save_manifest(query, out / "validation-query.jsonl");
  save_manifest(cands, out / "candidates.jsonl");
}

}  // namespace oadino::synth

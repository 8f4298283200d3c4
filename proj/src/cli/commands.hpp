#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace oadino::cli {

namespace fs = std::filesystem;

struct Common {
  int threads = 0;  // 0 = OADINO_THREADS or 1
  bool verbose = false;
};

struct GenSyntheticOptions {
  fs::path out;
  std::uint64_t seed = 0;
  std::size_t n = 600;
  long train = -1;  // -1 = n/6
  long queries = -1;
  std::size_t grid = 8;
  std::size_t patch_px = 16;
  std::size_t dim = 48;
  std::size_t objects_min = 3;
  std::size_t objects_max = 10;
  double colour_weight = 0.01;
  double geometry_weight = 1.0;
  double marker = 4.0;
  double noise = 0.05;
};

struct ImportOptions {
  fs::path images;
  fs::path embeddings;
  fs::path globals;
  fs::path annotations;
  std::string split = "candidates";
  fs::path out;
};

struct SegmentOptions {
  std::vector<fs::path> manifests;
  fs::path out;
  std::size_t t = 50;
  bool visualize = false;
};

struct ExtractOptions {
  std::vector<fs::path> manifests;
  fs::path masks;
  fs::path out;
};

struct MaskApplyOptions {
  std::vector<fs::path> manifests;
  fs::path masks;
  fs::path out;
};

struct TrainOptions {
  fs::path patches;
  fs::path manifest;  // optional: restrict to these ids
  fs::path out;
  std::size_t epochs = 50;
  std::size_t batch = 128;
  double lr = 1e-4;
  double beta = 1e-4;
  std::size_t latent = 32;
  std::uint64_t seed = 0;
  std::size_t max_patches = 0;  // 0 = all
};

struct EmbedOptions {
  std::vector<fs::path> manifests;
  fs::path patches;
  fs::path masks;
  fs::path model;
  fs::path out;
  std::string mode = "joint";
};

struct RetrieveOptions {
  fs::path query_manifest;
  fs::path candidate_manifest;
  fs::path reps;
  fs::path out;
  std::vector<std::string> queries;
};

struct EvaluateOptions {
  fs::path query_manifest;
  fs::path candidate_manifest;
  fs::path reps;
  fs::path out;
  fs::path masks;  // optional, enables colour distance
  std::size_t k = 10;
  std::size_t trials = 7;
  std::size_t queries = 50;
  std::size_t candidates = 5000;
  std::uint64_t seed = 0;
  std::vector<std::string> families;
  std::string base = "SDM";
  std::size_t contact_sheets = 5;
};

struct ReportOptions {
  fs::path report;
  fs::path baseline;
  std::string format = "text";
};

void gen_synthetic(const GenSyntheticOptions& o, const Common& c);
void import_files(const ImportOptions& o, const Common& c);
void segment(const SegmentOptions& o, const Common& c);
void extract_patches(const ExtractOptions& o, const Common& c);
void mask_apply(const MaskApplyOptions& o, const Common& c);
void train_vae(const TrainOptions& o, const Common& c);
void embed(const EmbedOptions& o, const Common& c);
void retrieve(const RetrieveOptions& o, const Common& c);
void evaluate(const EvaluateOptions& o, const Common& c);
void report(const ReportOptions& o, const Common& c);

}  // namespace oadino::cli

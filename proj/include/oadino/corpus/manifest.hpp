#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oadino/corpus/annotation.hpp"

namespace oadino {

enum class Split { Train, ValidationQuery, Candidates };

std::string_view split_name(Split s);
Split split_from_name(std::string_view name);

// Paths are kept exactly as written in the manifest; relative paths resolve
// against the manifest's directory.
struct ManifestEntry {
  std::string image_id;
  std::string image_path;
  std::string embedding_path;
  std::optional<std::string> global_feature_path;
  std::optional<SceneAnnotation> annotation;

  bool operator==(const ManifestEntry&) const = default;
};

// JSONL file: a header line {"format":"oadino-manifest","version":1,"split":...}
// followed by one entry object per line.
struct Manifest {
  Split split = Split::Train;
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& path) const;
  std::filesystem::path image_file(const ManifestEntry& e) const { return resolve(e.image_path); }
  std::filesystem::path embedding_file(const ManifestEntry& e) const { return resolve(e.embedding_path); }
  std::optional<std::filesystem::path> global_file(const ManifestEntry& e) const;
};

std::string serialize_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir);

// Loading validates unique ids and, when check_files is set, that every
// referenced file exists.
Manifest load_manifest(const std::filesystem::path& path, bool check_files = true);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

}  // namespace oadino

#include "oadino/corpus/manifest.hpp"

#include <set>
#include <sstream>

#include "oadino/error.hpp"
#include "oadino/util/binary_io.hpp"

namespace oadino {

namespace fs = std::filesystem;

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::ValidationQuery: return "validation-query";
    case Split::Candidates: return "candidates";
  }
  return "?";
}

Split split_from_name(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "validation-query") return Split::ValidationQuery;
  if (name == "candidates") return Split::Candidates;
  throw FormatError("unknown split \"" + std::string(name) + "\"");
}

fs::path Manifest::resolve(const std::string& path) const {
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::optional<fs::path> Manifest::global_file(const ManifestEntry& e) const {
  if (!e.global_feature_path) return std::nullopt;
  return resolve(*e.global_feature_path);
}

std::string serialize_manifest(const Manifest& manifest) {
  nlohmann::ordered_json header;
  header["format"] = "oadino-manifest";
  header["version"] = 1;
  header["split"] = std::string(split_name(manifest.split));
  std::string text = header.dump() + "\n";
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json j;
    j["image_id"] = e.image_id;
    j["image_path"] = e.image_path;
    j["embedding_path"] = e.embedding_path;
    if (e.global_feature_path) j["global_feature_path"] = *e.global_feature_path;
    if (e.annotation) j["annotation"] = annotation_to_json(*e.annotation, false);
    text += j.dump();
    text += '\n';
  }
  return text;
}

Manifest parse_manifest(std::string_view text, const fs::path& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "manifest line " + std::to_string(line_no) + ": ";
    try {
      const auto j = nlohmann::ordered_json::parse(line);
      if (!have_header) {
        if (j.value("format", "") != "oadino-manifest") throw FormatError(where + "missing manifest header");
        if (j.value("version", 0) != 1) throw FormatError(where + "unsupported manifest version");
        m.split = split_from_name(j.at("split").get<std::string>());
        have_header = true;
        continue;
      }
      ManifestEntry e;
      e.image_id = j.at("image_id").get<std::string>();
      e.image_path = j.at("image_path").get<std::string>();
      e.embedding_path = j.at("embedding_path").get<std::string>();
      if (j.contains("global_feature_path")) e.global_feature_path = j.at("global_feature_path").get<std::string>();
      if (j.contains("annotation")) e.annotation = annotation_from_json(j.at("annotation"), e.image_id);
      if (!seen.insert(e.image_id).second) throw FormatError(where + "duplicate image_id " + e.image_id);
      m.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(where + ex.what());
    } catch (const FormatError& ex) {
      if (std::string(ex.what()).starts_with("manifest line")) throw;
      throw FormatError(where + ex.what());
    }
  }
  if (!have_header) throw FormatError("empty manifest");
  return m;
}

Manifest load_manifest(const fs::path& path, bool check_files) {
  Manifest m;
  try {
    m = parse_manifest(io::read_text(path), path.parent_path());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (check_files) {
    for (const auto& e : m.entries) {
      std::vector<fs::path> files = {m.image_file(e), m.embedding_file(e)};
      if (auto g = m.global_file(e)) files.push_back(*g);
      for (const auto& f : files) {
        if (!fs::exists(f)) throw ConfigError(path.string() + ": missing file " + f.string());
      }
    }
  }
  return m;
}

void save_manifest(const Manifest& manifest, const fs::path& path) {
  io::write_text(path, serialize_manifest(manifest));
}

}  // namespace oadino

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace oadino {

enum class Attribute { Shape, Size, Material, Colour };

inline constexpr std::array<Attribute, 4> kAllAttributes = {Attribute::Shape, Attribute::Size,
                                                            Attribute::Material, Attribute::Colour};

// Single-letter codes used in subset labels: S, D, M, C.
char attribute_code(Attribute a);
std::string_view attribute_name(Attribute a);
std::optional<Attribute> attribute_from_code(char code);

struct ObjectAttributes {
  std::string shape;
  std::string size;
  std::string material;
  std::optional<std::string> colour;  // absent for colourless schemas

  // nullopt when the attribute is not annotated on this object.
  std::optional<std::string_view> value(Attribute a) const;
  bool operator==(const ObjectAttributes&) const = default;
};

struct SceneAnnotation {
  std::string image_id;
  std::vector<ObjectAttributes> objects;
  std::optional<std::size_t> reference_object_index;

  // At least one object; the reference index, when present, is in range.
  void validate() const;
  const ObjectAttributes& reference_object() const;
  bool operator==(const SceneAnnotation&) const = default;
};

nlohmann::ordered_json object_to_json(const ObjectAttributes& o);
ObjectAttributes object_from_json(const nlohmann::ordered_json& j);

// `with_id` controls whether "image_id" is emitted (manifests embed the
// annotation next to the entry's own id and omit it).
nlohmann::ordered_json annotation_to_json(const SceneAnnotation& a, bool with_id = true);
SceneAnnotation annotation_from_json(const nlohmann::ordered_json& j, std::string image_id = {});

// JSON-lines, one scene per line.
void write_annotations(const std::vector<SceneAnnotation>& scenes, const std::filesystem::path& path);
std::vector<SceneAnnotation> read_annotations(const std::filesystem::path& path);

}  // namespace oadino

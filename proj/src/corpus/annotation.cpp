#include "oadino/corpus/annotation.hpp"

#include <sstream>

#include "oadino/error.hpp"
#include "oadino/util/binary_io.hpp"

namespace oadino {

char attribute_code(Attribute a) {
  switch (a) {
    case Attribute::Shape: return 'S';
    case Attribute::Size: return 'D';
    case Attribute::Material: return 'M';
    case Attribute::Colour: return 'C';
  }
  return '?';
}

std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::Shape: return "shape";
    case Attribute::Size: return "size";
    case Attribute::Material: return "material";
    case Attribute::Colour: return "colour";
  }
  return "?";
}

std::optional<Attribute> attribute_from_code(char code) {
  for (auto a : kAllAttributes) {
    if (attribute_code(a) == code) return a;
  }
  return std::nullopt;
}

std::optional<std::string_view> ObjectAttributes::value(Attribute a) const {
  switch (a) {
    case Attribute::Shape: return std::string_view(shape);
    case Attribute::Size: return std::string_view(size);
    case Attribute::Material: return std::string_view(material);
    case Attribute::Colour:
      if (colour) return std::string_view(*colour);
      return std::nullopt;
  }
  return std::nullopt;
}

void SceneAnnotation::validate() const {
  if (objects.empty()) throw FormatError("annotation " + image_id + " has no objects");
  if (reference_object_index && *reference_object_index >= objects.size()) {
    throw FormatError("annotation " + image_id + " reference_object_index out of range");
  }
}

const ObjectAttributes& SceneAnnotation::reference_object() const {
  if (!reference_object_index) {
    throw ConfigError("annotation " + image_id + " has no reference_object_index");
  }
  return objects.at(*reference_object_index);
}

nlohmann::ordered_json object_to_json(const ObjectAttributes& o) {
  nlohmann::ordered_json j;
  j["shape"] = o.shape;
  j["size"] = o.size;
  j["material"] = o.material;
  if (o.colour) j["colour"] = *o.colour;
  return j;
}

ObjectAttributes object_from_json(const nlohmann::ordered_json& j) {
  try {
    ObjectAttributes o;
    o.shape = j.at("shape").get<std::string>();
    o.size = j.at("size").get<std::string>();
    o.material = j.at("material").get<std::string>();
    if (j.contains("colour") && !j.at("colour").is_null()) o.colour = j.at("colour").get<std::string>();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad object record: ") + e.what());
  }
}

nlohmann::ordered_json annotation_to_json(const SceneAnnotation& a, bool with_id) {
  nlohmann::ordered_json j;
  if (with_id) j["image_id"] = a.image_id;
  auto objects = nlohmann::ordered_json::array();
  for (const auto& o : a.objects) objects.push_back(object_to_json(o));
  j["objects"] = std::move(objects);
  if (a.reference_object_index) j["reference_object_index"] = *a.reference_object_index;
  return j;
}

SceneAnnotation annotation_from_json(const nlohmann::ordered_json& j, std::string image_id) {
  SceneAnnotation a;
  try {
    a.image_id = j.contains("image_id") ? j.at("image_id").get<std::string>() : std::move(image_id);
    for (const auto& o : j.at("objects")) a.objects.push_back(object_from_json(o));
    if (j.contains("reference_object_index") && !j.at("reference_object_index").is_null()) {
      a.reference_object_index = j.at("reference_object_index").get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad annotation: ") + e.what());
  }
  a.validate();
  return a;
}

void write_annotations(const std::vector<SceneAnnotation>& scenes, const std::filesystem::path& path) {
  std::string text;
  for (const auto& s : scenes) {
    text += annotation_to_json(s).dump();
    text += '\n';
  }
  io::write_text(path, text);
}

std::vector<SceneAnnotation> read_annotations(const std::filesystem::path& path) {
  std::istringstream in(io::read_text(path));
  std::vector<SceneAnnotation> scenes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      scenes.push_back(annotation_from_json(nlohmann::ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return scenes;
}

}  // namespace oadino

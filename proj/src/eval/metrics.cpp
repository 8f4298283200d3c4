#include <algorithm>
#include <cmath>

#include "oadino/error.hpp"
#include "oadino/eval/eval.hpp"

namespace oadino::eval {

bool Schema::has(Attribute a) const { return std::find(attributes.begin(), attributes.end(), a) != attributes.end(); }

Schema schema_of(std::span<const SceneAnnotation> scenes) {
  Schema s{{Attribute::Shape, Attribute::Size, Attribute::Material}};
  bool colour = !scenes.empty();
  for (const auto& scene : scenes) {
    for (const auto& o : scene.objects) colour = colour && o.colour.has_value();
  }
  if (colour) s.attributes.push_back(Attribute::Colour);
  return s;
}

Schema full_schema() { return Schema{{kAllAttributes.begin(), kAllAttributes.end()}}; }

AttributeSubset parse_subset(std::string_view codes) {
  AttributeSubset out;
  for (char c : codes) {
    const auto a = attribute_from_code(c);
    if (!a) throw ArgumentError("unknown attribute code '" + std::string(1, c) + "'");
    if (std::find(out.begin(), out.end(), *a) != out.end()) {
      throw ArgumentError("attribute code '" + std::string(1, c) + "' repeated");
    }
    out.push_back(*a);
  }
  if (out.empty()) throw ArgumentError("empty attribute subset");
  std::sort(out.begin(), out.end());
  return out;
}

std::string subset_name(const AttributeSubset& subset) {
  std::string s;
  for (auto a : subset) s += attribute_code(a);
  return s;
}

bool attribute_match(const ObjectAttributes& reference, const SceneAnnotation& scene, const AttributeSubset& subset,
                     const Schema& schema) {
  if (subset.empty()) throw ArgumentError("empty attribute subset");
  for (auto a : subset) {
    if (!schema.has(a)) {
      throw SchemaError("attribute " + std::string(attribute_name(a)) + " is not part of the annotation schema");
    }
    if (!reference.value(a)) {
      throw SchemaError("reference object has no " + std::string(attribute_name(a)) + " value");
    }
  }
  for (const auto& o : scene.objects) {
    bool all = true;
    for (auto a : subset) {
      const auto v = o.value(a);
      if (!v || *v != *reference.value(a)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

double harmonic(std::size_t k) {
  double h = 0.0;
  for (std::size_t i = 1; i <= k; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

double top_k_precision(std::span<const std::uint8_t> relevant, std::size_t k) {
  if (k == 0) throw ArgumentError("k must be >= 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, relevant.size()); ++i) hits += relevant[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double weighted_precision(std::span<const std::uint8_t> relevant, std::size_t k) {
  if (k == 0) throw ArgumentError("k must be >= 1");
  double num = 0.0;
  for (std::size_t i = 0; i < std::min(k, relevant.size()); ++i) {
    if (relevant[i]) num += 1.0 / static_cast<double>(i + 1);
  }
  return num / harmonic(k);
}

std::vector<std::uint8_t> relevance(const RankedList& ranked, const Matcher& matcher, std::size_t k) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < std::min(k, ranked.entries.size()); ++i) {
    out.push_back(matcher(ranked.entries[i].candidate_id) ? 1 : 0);
  }
  return out;
}

double top_k_precision(const RankedList& ranked, const Matcher& matcher, std::size_t k) {
  return top_k_precision(relevance(ranked, matcher, k), k);
}

double weighted_precision(const RankedList& ranked, const Matcher& matcher, std::size_t k) {
  return weighted_precision(relevance(ranked, matcher, k), k);
}

ErrorRate error_rate(std::span<const QueryOutcome> outcomes, std::size_t k) {
  if (k == 0) throw ArgumentError("k must be >= 1");
  ErrorRate r;
  std::size_t failures = 0;
  for (const auto& q : outcomes) {
    if (!q.has_valid_candidate) {
      ++r.excluded;
      continue;
    }
    ++r.evaluated;
    bool hit = false;
    for (std::size_t i = 0; i < std::min(k, q.relevant.size()); ++i) hit = hit || q.relevant[i];
    if (!hit) ++failures;
  }
  r.rate = r.evaluated == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(r.evaluated);
  return r;
}

std::vector<AttributeSubset> powerset_family(const AttributeSubset& base, std::size_t i, bool plus_colour) {
  if (i == 0 || i > base.size()) {
    throw ArgumentError("subset size " + std::to_string(i) + " out of range for base " + subset_name(base));
  }
  std::vector<AttributeSubset> out;
  // Choose positions in lexicographic order via a selection mask.
  std::vector<std::uint8_t> pick(base.size(), 0);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(i), 1);
  do {
    AttributeSubset s;
    for (std::size_t j = 0; j < base.size(); ++j) {
      if (pick[j]) s.push_back(base[j]);
    }
    if (plus_colour && std::find(s.begin(), s.end(), Attribute::Colour) == s.end()) s.push_back(Attribute::Colour);
    std::sort(s.begin(), s.end());
    out.push_back(std::move(s));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

double powerset_eval(std::span<const AttributeSubset> family,
                     const std::function<double(const AttributeSubset&)>& metric) {
  if (family.empty()) throw ArgumentError("empty subset family");
  double sum = 0.0;
  for (const auto& s : family) sum += metric(s);
  return sum / static_cast<double>(family.size());
}

SubsetFamily family_from_name(std::string_view name, const AttributeSubset& base) {
  SubsetFamily f{std::string(name), {}};
  if (name.size() >= 2 && name[0] == 'P' && name[1] >= '1' && name[1] <= '9') {
    std::string_view rest = name.substr(1);
    bool plus = false;
    if (rest.size() > 2 && rest.substr(rest.size() - 2) == "+C") {
      plus = true;
      rest.remove_suffix(2);
    }
    if (rest.size() != 1) throw ArgumentError("bad family name '" + std::string(name) + "'");
    f.subsets = powerset_family(base, static_cast<std::size_t>(rest[0] - '0'), plus);
    return f;
  }
  f.subsets.push_back(parse_subset(name));
  return f;
}

std::vector<std::string> default_family_names() {
  return {"S", "D", "M", "C", "P1", "P2", "P3", "P1+C", "P2+C", "P3+C"};
}

double colour_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dr = a[0] - b[0], dg = a[1] - b[1], db = a[2] - b[2];
  return std::sqrt(dr * dr + dg * dg + db * db);
}

void TrialSpec::validate() const {
  if (n_trials == 0 || queries_per_trial == 0 || candidate_pool_size == 0 || k == 0) {
    throw ConfigError("trial counts, pool size and k must all be positive");
  }
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

}  // namespace oadino::eval

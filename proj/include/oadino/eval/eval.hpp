#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oadino/corpus/annotation.hpp"
#include "oadino/corpus/image.hpp"
#include "oadino/similarity/similarity.hpp"

namespace oadino::eval {

// Attributes sorted in Attribute order, no duplicates, nonempty.
using AttributeSubset = std::vector<Attribute>;

// Attributes the annotations actually carry. Colour is present only when
// every object in the corpus has one.
struct Schema {
  std::vector<Attribute> attributes;
  bool has(Attribute a) const;
};
Schema schema_of(std::span<const SceneAnnotation> scenes);
Schema full_schema();

// "SDM" <-> {Shape, Size, Material}. Throws ArgumentError on unknown or
// repeated letters.
AttributeSubset parse_subset(std::string_view codes);
std::string subset_name(const AttributeSubset& subset);

// True iff `scene` contains an object equal to `reference` on every attribute
// in `subset`. Throws SchemaError when the schema lacks a subset attribute or
// the reference has no value for it.
bool attribute_match(const ObjectAttributes& reference, const SceneAnnotation& scene, const AttributeSubset& subset,
                     const Schema& schema);

// H_k = sum_{i=1..k} 1/i
double harmonic(std::size_t k);

// `relevant[i]` says whether the entry at rank i+1 matches. Lists shorter
// than k count the missing ranks as misses.
double top_k_precision(std::span<const std::uint8_t> relevant, std::size_t k);
double weighted_precision(std::span<const std::uint8_t> relevant, std::size_t k);

using Matcher = std::function<bool(const std::string& candidate_id)>;
std::vector<std::uint8_t> relevance(const RankedList& ranked, const Matcher& matcher, std::size_t k);
double top_k_precision(const RankedList& ranked, const Matcher& matcher, std::size_t k = 10);
double weighted_precision(const RankedList& ranked, const Matcher& matcher, std::size_t k = 10);

struct QueryOutcome {
  std::vector<std::uint8_t> relevant;  // top-k relevance in rank order
  bool has_valid_candidate = true;     // any match anywhere in the pool
};
struct ErrorRate {
  double rate = 0.0;
  std::size_t evaluated = 0;  // queries with at least one valid candidate
  std::size_t excluded = 0;   // queries without any
};
// Fraction of evaluated queries with no match in the top k.
ErrorRate error_rate(std::span<const QueryOutcome> outcomes, std::size_t k = 10);

// All size-i subsets of `base` in lexicographic order of positions, with
// colour appended to each when `plus_colour`.
std::vector<AttributeSubset> powerset_family(const AttributeSubset& base, std::size_t i, bool plus_colour = false);

// Unweighted mean of `metric` over the family.
double powerset_eval(std::span<const AttributeSubset> family,
                     const std::function<double(const AttributeSubset&)>& metric);

struct SubsetFamily {
  std::string name;
  std::vector<AttributeSubset> subsets;
};
// Names: single letters S, D, M, C (or any letter string such as "SM"),
// "P<i>" for the size-i family over `base`, and "P<i>+C".
SubsetFamily family_from_name(std::string_view name, const AttributeSubset& base);
std::vector<std::string> default_family_names();

// Euclidean distance between two mean RGB vectors.
double colour_distance(const std::array<double, 3>& a, const std::array<double, 3>& b);

struct TrialSpec {
  std::size_t n_trials = 7;
  std::size_t queries_per_trial = 50;
  std::size_t candidate_pool_size = 5000;
  std::size_t k = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EvalItem {
  std::string id;
  SceneAnnotation annotation;
  PreparedRepresentation representation;
  std::optional<std::array<double, 3>> mean_rgb;  // foreground colour, when known
};

struct SubsetMetrics {
  std::string subset;
  double top_k_precision = 0.0;
  double weighted_precision = 0.0;
  double error_rate = 0.0;
  std::size_t error_evaluated = 0;
  std::size_t error_excluded = 0;
};

struct FamilyMetrics {
  std::string family;
  std::vector<SubsetMetrics> subsets;
  double top_k_precision = 0.0;  // powerset means
  double weighted_precision = 0.0;
  double error_rate = 0.0;
};

struct TrialResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> query_ids;  // draw order
  std::size_t pool_size = 0;           // candidates each query was ranked against
  std::vector<RankedList> top_k;       // per query, truncated to k
  std::vector<FamilyMetrics> families;
  std::optional<double> colour_distance;  // mean over queries
  std::size_t colour_excluded = 0;        // queries or retrievals without foreground colour
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population
};

struct FamilySummary {
  std::string family;
  Summary top_k_precision;
  Summary weighted_precision;
  Summary error_rate;
};

struct MetricsReport {
  TrialSpec spec;
  std::string representation;  // label, e.g. "joint" or "global"
  std::string query_source;
  std::string candidate_source;
  std::size_t query_split_size = 0;
  std::size_t candidate_split_size = 0;
  std::vector<TrialResult> trials;
  std::vector<FamilySummary> summary;
  std::optional<Summary> colour_distance;
};

Summary summarize(std::span<const double> values);

// For trial t: seed + t drives query sampling without replacement, then (if
// the candidate split is larger than the pool) the candidate pool. Throws
// ConfigError when either split is too small or a query has no reference
// object, SchemaError when a family needs an attribute the schema lacks.
MetricsReport run_trials(std::span<const EvalItem> queries, std::span<const EvalItem> candidates,
                         const TrialSpec& spec, std::span<const SubsetFamily> families, unsigned threads = 1);

std::string report_json(const MetricsReport& report);
// Rows: trial,family,subset,top_k_precision,weighted_precision,error_rate.
// Aggregate rows use trial "mean" and "std" and subset "*".
std::string report_csv(const MetricsReport& report);

// Query followed by its retrievals, each scaled to cell x cell, separated by
// a gap of `gap` pixels.
Image contact_sheet(const Image& query, std::span<const Image> retrieved, std::size_t cell = 96,
                    std::size_t gap = 4);

}  // namespace oadino::eval

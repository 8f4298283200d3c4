#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "oadino/error.hpp"
#include "oadino/eval/eval.hpp"
#include "oadino/util/rng.hpp"
#include "oracles.hpp"

using namespace oadino;
using namespace oadino::eval;

namespace {

ObjectAttributes obj(std::string s, std::string d, std::string m, std::string c) {
  return {std::move(s), std::move(d), std::move(m), std::move(c)};
}

std::vector<std::uint8_t> hits_at(std::initializer_list<std::size_t> ranks, std::size_t n = 10) {
  std::vector<std::uint8_t> r(n, 0);
  for (auto k : ranks) r[k - 1] = 1;
  return r;
}

EvalItem item(std::string id, std::vector<ObjectAttributes> objects, std::vector<double> vec,
              std::optional<std::size_t> ref = std::nullopt) {
  JointRepresentation rep;
  rep.image_id = id;
  rep.n_g = static_cast<std::uint32_t>(vec.size());
  rep.vectors.resize(1, static_cast<Eigen::Index>(vec.size()));
  for (std::size_t i = 0; i < vec.size(); ++i) rep.vectors(0, static_cast<Eigen::Index>(i)) = vec[i];
  return EvalItem{id, SceneAnnotation{id, std::move(objects), ref}, prepare(rep), std::nullopt};
}

}  // namespace

TEST(Match, Examples) {
  auto ref = obj("cube", "large", "rubber", "red");
  SceneAnnotation scene{"s", {obj("cube", "small", "rubber", "red")}, std::nullopt};
  EXPECT_TRUE(attribute_match(ref, scene, parse_subset("SMC"), full_schema()));
  EXPECT_FALSE(attribute_match(ref, scene, parse_subset("SD"), full_schema()));
  SceneAnnotation empty{"e", {}, std::nullopt};
  EXPECT_FALSE(attribute_match(ref, empty, parse_subset("S"), full_schema()));
}

TEST(Match, SchemaErrors) {
  auto ref = obj("cube", "large", "rubber", "red");
  SceneAnnotation scene{"s", {ref}, std::nullopt};
  Schema no_colour{{Attribute::Shape, Attribute::Size, Attribute::Material}};
  EXPECT_THROW(attribute_match(ref, scene, parse_subset("C"), no_colour), SchemaError);
  ObjectAttributes colourless{"cube", "large", "rubber", std::nullopt};
  EXPECT_THROW(attribute_match(colourless, scene, parse_subset("C"), full_schema()), SchemaError);
  std::vector<SceneAnnotation> scenes = {scene, SceneAnnotation{"t", {colourless}, std::nullopt}};
  EXPECT_FALSE(schema_of(scenes).has(Attribute::Colour));
}

TEST(Subsets, Parsing) {
  EXPECT_EQ(subset_name(parse_subset("CS")), "SC");
  EXPECT_THROW(parse_subset("SS"), ArgumentError);
  EXPECT_THROW(parse_subset("X"), ArgumentError);
  EXPECT_THROW(parse_subset(""), ArgumentError);
}

TEST(Precision, Examples) {
  EXPECT_DOUBLE_EQ(top_k_precision(hits_at({1, 3}), 10), 0.2);
  EXPECT_DOUBLE_EQ(top_k_precision(std::vector<std::uint8_t>(10, 1), 10), 1.0);
  EXPECT_DOUBLE_EQ(top_k_precision(std::vector<std::uint8_t>(10, 0), 10), 0.0);
  // Short lists count missing ranks as misses.
  EXPECT_DOUBLE_EQ(top_k_precision(std::vector<std::uint8_t>(3, 1), 10), 0.3);
}

TEST(Precision, WeightedExamples) {
  EXPECT_NEAR(harmonic(10), 7381.0 / 2520.0, 1e-15);
  EXPECT_NEAR(weighted_precision(hits_at({1, 3}), 10), (1.0 + 1.0 / 3.0) / (7381.0 / 2520.0), 1e-15);
  EXPECT_NEAR(weighted_precision(hits_at({1, 3}), 10), 0.455223, 1e-6);
  EXPECT_NEAR(weighted_precision(std::vector<std::uint8_t>(10, 1), 10), 1.0, 1e-15);
  EXPECT_NEAR(weighted_precision(hits_at({10}), 10), 0.03414, 1e-5);
}

TEST(Precision, ViaRankedList) {
  RankedList r{"q", {{"a", 0.9}, {"b", 0.8}, {"c", 0.7}}};
  Matcher m = [](const std::string& id) { return id != "b"; };
  EXPECT_EQ(relevance(r, m, 10), (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_DOUBLE_EQ(top_k_precision(r, m, 2), 0.5);
}

TEST(ErrorRate, Examples) {
  std::vector<QueryOutcome> q = {{hits_at({2}), true}, {hits_at({}), true}, {hits_at({10}), true}};
  EXPECT_NEAR(error_rate(q).rate, 1.0 / 3.0, 1e-15);
  q.push_back({hits_at({}), false});
  ErrorRate e = error_rate(q);
  EXPECT_NEAR(e.rate, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(e.evaluated, 3u);
  EXPECT_EQ(e.excluded, 1u);
  std::vector<QueryOutcome> all = {{hits_at({1}), true}, {hits_at({5}), true}};
  EXPECT_EQ(error_rate(all).rate, 0.0);
}

TEST(Metrics, MatchBruteForceOnRandomInstances) {
  Rng rng(77);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t k = 1 + rng.below(10);
    const std::size_t nq = 1 + rng.below(8);
    std::vector<QueryOutcome> outcomes;
    std::vector<std::vector<int>> hits;
    std::vector<int> valid;
    for (std::size_t q = 0; q < nq; ++q) {
      const std::size_t len = rng.below(k + 3);
      std::vector<std::uint8_t> r(len);
      std::vector<int> h(len);
      for (std::size_t i = 0; i < len; ++i) h[i] = r[i] = rng.uniform() < 0.3 ? 1 : 0;
      const bool any = rng.uniform() < 0.85;
      outcomes.push_back({r, any});
      hits.push_back(h);
      valid.push_back(any ? 1 : 0);
      EXPECT_NEAR(top_k_precision(r, k), oracle::precision(h, k), 1e-12);
      EXPECT_NEAR(weighted_precision(r, k), oracle::weighted(h, k), 1e-12);
    }
    EXPECT_NEAR(error_rate(outcomes, k).rate, oracle::error(hits, valid, k), 1e-12);
  }
}

TEST(Metrics, WeightedIsOneOnlyWhenAllMatch) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint8_t> r(10);
    for (auto& v : r) v = rng.uniform() < 0.8 ? 1 : 0;
    const double w = weighted_precision(r, 10);
    const bool all = std::all_of(r.begin(), r.end(), [](auto v) { return v == 1; });
    EXPECT_LE(w, 1.0 + 1e-15);
    EXPECT_GE(w, 0.0);
    EXPECT_EQ(std::abs(w - 1.0) < 1e-12, all);
  }
}

TEST(Powerset, Families) {
  auto base = parse_subset("SDM");
  auto p2 = powerset_family(base, 2);
  ASSERT_EQ(p2.size(), 3u);
  EXPECT_EQ(subset_name(p2[0]), "SD");
  EXPECT_EQ(subset_name(p2[1]), "SM");
  EXPECT_EQ(subset_name(p2[2]), "DM");
  auto p3c = powerset_family(base, 3, true);
  ASSERT_EQ(p3c.size(), 1u);
  EXPECT_EQ(subset_name(p3c[0]), "SDMC");
  EXPECT_THROW(powerset_family(base, 4), ArgumentError);

  auto p1 = powerset_family(base, 1);
  std::map<std::string, double> v = {{"S", 0.9}, {"D", 0.8}, {"M", 0.7}};
  EXPECT_NEAR(powerset_eval(p1, [&](const AttributeSubset& s) { return v[subset_name(s)]; }), 0.8, 1e-15);
}

TEST(Powerset, FamilyNames) {
  auto base = parse_subset("SDM");
  EXPECT_EQ(family_from_name("P2+C", base).subsets.size(), 3u);
  EXPECT_EQ(family_from_name("C", base).subsets.size(), 1u);
  EXPECT_EQ(subset_name(family_from_name("SM", base).subsets[0]), "SM");
  EXPECT_THROW(family_from_name("P9", base), ArgumentError);
  EXPECT_EQ(default_family_names().size(), 10u);
}

TEST(ColourDistance, Examples) {
  EXPECT_DOUBLE_EQ(colour_distance({1, 0, 0}, {0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(colour_distance({0.3, 0.2, 0.1}, {0.3, 0.2, 0.1}), 0.0);
  EXPECT_NEAR(colour_distance({1, 1, 1}, {0, 0, 0}), 1.7320508, 1e-7);
}

TEST(Trials, DefaultsAndValidation) {
  TrialSpec s;
  EXPECT_EQ(s.n_trials, 7u);
  EXPECT_EQ(s.queries_per_trial, 50u);
  EXPECT_EQ(s.candidate_pool_size, 5000u);
  EXPECT_EQ(s.k, 10u);
  s.k = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Trials, EverythingMatches) {
  std::vector<EvalItem> q, c;
  for (int i = 0; i < 6; ++i) q.push_back(item("q" + std::to_string(i), {obj("cube", "large", "metal", "red")}, {1.0, 0.1 * i}, 0));
  for (int i = 0; i < 30; ++i) {
    c.push_back(item("c" + std::to_string(i), {obj("cube", "large", "metal", "red")}, {0.5, 1.0 + i}));
  }
  TrialSpec spec{3, 4, 20, 10, 1};
  std::vector<SubsetFamily> fams;
  for (const auto& n : default_family_names()) fams.push_back(family_from_name(n, parse_subset("SDM")));
  MetricsReport r = run_trials(q, c, spec, fams);
  ASSERT_EQ(r.trials.size(), 3u);
  for (const auto& f : r.summary) {
    EXPECT_EQ(f.top_k_precision.mean, 1.0);
    EXPECT_EQ(f.weighted_precision.mean, 1.0);
    EXPECT_EQ(f.error_rate.mean, 0.0);
  }
}

TEST(Trials, DeterministicAndDuplicateFree) {
  Rng rng(3);
  const char* shapes[] = {"cube", "sphere", "cylinder"};
  const char* colours[] = {"red", "blue", "green"};
  auto random_objects = [&] {
    std::vector<ObjectAttributes> o;
    for (int j = 0; j < 3; ++j) {
      o.push_back(obj(shapes[rng.below(3)], rng.below(2) ? "large" : "small", rng.below(2) ? "metal" : "rubber",
                      colours[rng.below(3)]));
    }
    return o;
  };
  std::vector<EvalItem> q, c;
  for (int i = 0; i < 15; ++i) q.push_back(item("q" + std::to_string(i), random_objects(), {rng.normal(), rng.normal()}, 1));
  for (int i = 0; i < 60; ++i) c.push_back(item("c" + std::to_string(i), random_objects(), {rng.normal(), rng.normal()}));
  TrialSpec spec{4, 10, 40, 5, 9};
  std::vector<SubsetFamily> fams = {family_from_name("S", parse_subset("SDM")),
                                    family_from_name("P3+C", parse_subset("SDM"))};
  MetricsReport a = run_trials(q, c, spec, fams, 1);
  MetricsReport b = run_trials(q, c, spec, fams, 3);
  EXPECT_EQ(report_json(a), report_json(b));
  EXPECT_EQ(report_csv(a), report_csv(b));
  for (const auto& t : a.trials) {
    EXPECT_EQ(t.seed, 9 + t.index);
    std::set<std::string> ids(t.query_ids.begin(), t.query_ids.end());
    EXPECT_EQ(ids.size(), 10u);
    for (const auto& list : t.top_k) EXPECT_EQ(list.entries.size(), 5u);
    for (const auto& f : t.families) {
      EXPECT_GE(f.top_k_precision, 0.0);
      EXPECT_LE(f.top_k_precision, 1.0);
    }
  }

  // Precision agrees with a direct recount of the stored rankings.
  const auto& t0 = a.trials[0];
  double sum = 0;
  for (std::size_t qi = 0; qi < t0.query_ids.size(); ++qi) {
    const auto& qa = *std::find_if(q.begin(), q.end(), [&](const EvalItem& e) { return e.id == t0.query_ids[qi]; });
    std::vector<int> h;
    for (const auto& e : t0.top_k[qi].entries) {
      const auto& ca = *std::find_if(c.begin(), c.end(), [&](const EvalItem& x) { return x.id == e.candidate_id; });
      bool m = false;
      for (const auto& o : ca.annotation.objects) m = m || o.shape == qa.annotation.reference_object().shape;
      h.push_back(m ? 1 : 0);
    }
    sum += oracle::precision(h, 5);
  }
  EXPECT_NEAR(t0.families[0].top_k_precision, sum / static_cast<double>(t0.query_ids.size()), 1e-12);
}

TEST(Trials, ConfigErrors) {
  std::vector<EvalItem> q = {item("q", {obj("cube", "large", "metal", "red")}, {1.0}, 0)};
  std::vector<EvalItem> c = {item("c", {obj("cube", "large", "metal", "red")}, {1.0})};
  std::vector<SubsetFamily> fams = {family_from_name("S", parse_subset("SDM"))};
  EXPECT_THROW(run_trials(q, c, TrialSpec{1, 2, 1, 1, 0}, fams), ConfigError);
  EXPECT_THROW(run_trials(q, c, TrialSpec{1, 1, 2, 1, 0}, fams), ConfigError);
  std::vector<EvalItem> no_ref = {item("q", {obj("cube", "large", "metal", "red")}, {1.0})};
  EXPECT_THROW(run_trials(no_ref, c, TrialSpec{1, 1, 1, 1, 0}, fams), ConfigError);
  EXPECT_THROW(run_trials(q, c, TrialSpec{1, 1, 1, 1, 0}, {}), ConfigError);
}

TEST(ContactSheet, Layout) {
  Image q("q", 4, 4, 1.0f);
  std::vector<Image> r = {Image("a", 8, 8, 0.0f), Image("b", 2, 2, 0.5f)};
  Image s = contact_sheet(q, r, 10, 2);
  EXPECT_EQ(s.width, 3u * 10u + 2u * 2u);
  EXPECT_EQ(s.height, 10u);
  EXPECT_FLOAT_EQ(s.at(5, 5, 0), 1.0f);
  EXPECT_FLOAT_EQ(s.at(5, 15, 0), 0.0f);
  EXPECT_FLOAT_EQ(s.at(5, 27, 0), 0.5f);
}

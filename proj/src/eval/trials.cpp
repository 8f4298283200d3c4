#include <algorithm>
#include <map>
#include <unordered_map>

#include "oadino/error.hpp"
#include "oadino/eval/eval.hpp"
#include "oadino/util/parallel.hpp"
#include "oadino/util/rng.hpp"

namespace oadino::eval {

namespace {

void check_unique(std::span<const EvalItem> items, const char* what) {
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!seen.emplace(items[i].id, i).second) {
      throw ConfigError(std::string(what) + " split lists id " + items[i].id + " twice");
    }
  }
}

}  // namespace

MetricsReport run_trials(std::span<const EvalItem> queries, std::span<const EvalItem> candidates,
                         const TrialSpec& spec, std::span<const SubsetFamily> families, unsigned threads) {
  spec.validate();
  if (families.empty()) throw ConfigError("no subset families requested");
  if (queries.size() < spec.queries_per_trial) {
    throw ConfigError("query split has " + std::to_string(queries.size()) + " images, " +
                      std::to_string(spec.queries_per_trial) + " needed per trial");
  }
  if (candidates.size() < spec.candidate_pool_size) {
    throw ConfigError("candidate split has " + std::to_string(candidates.size()) + " images, pool needs " +
                      std::to_string(spec.candidate_pool_size));
  }
  check_unique(queries, "query");
  check_unique(candidates, "candidate");
  for (const auto& q : queries) {
    if (!q.annotation.reference_object_index) {
      throw ConfigError("query " + q.id + " has no reference_object_index");
    }
    q.annotation.validate();
  }

  // Attributes must exist on every scene involved.
  std::vector<SceneAnnotation> all;
  all.reserve(queries.size() + candidates.size());
  for (const auto& q : queries) all.push_back(q.annotation);
  for (const auto& c : candidates) all.push_back(c.annotation);
  const Schema schema = schema_of(all);
  all.clear();
  for (const auto& f : families) {
    for (const auto& s : f.subsets) {
      for (auto a : s) {
        if (!schema.has(a)) {
          throw SchemaError("family " + f.name + " needs attribute " + std::string(attribute_name(a)) +
                            ", which the annotations do not carry");
        }
      }
    }
  }

  // Distinct subsets, so each is evaluated once per query.
  std::map<AttributeSubset, std::size_t> subset_slot;
  for (const auto& f : families) {
    for (const auto& s : f.subsets) subset_slot.emplace(s, subset_slot.size());
  }

  std::unordered_map<std::string, std::size_t> cand_index;
  for (std::size_t i = 0; i < candidates.size(); ++i) cand_index.emplace(candidates[i].id, i);

  const bool full_pool = candidates.size() == spec.candidate_pool_size;
  std::vector<PreparedRepresentation> all_reps;
  if (full_pool) {
    for (const auto& c : candidates) all_reps.push_back(c.representation);
  }
  // Rankings against the full pool are reused when a query recurs.
  std::unordered_map<std::size_t, RankedList> cache;

  MetricsReport report;
  report.spec = spec;
  report.query_split_size = queries.size();
  report.candidate_split_size = candidates.size();

  for (std::size_t t = 0; t < spec.n_trials; ++t) {
    TrialResult trial;
    trial.index = t;
    trial.seed = spec.seed + t;
    Rng rng(trial.seed);
    const auto q_idx = rng.sample_without_replacement(queries.size(), spec.queries_per_trial);
    std::vector<std::size_t> pool;
    if (full_pool) {
      pool.resize(candidates.size());
      for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    } else {
      pool = rng.sample_without_replacement(candidates.size(), spec.candidate_pool_size);
      std::sort(pool.begin(), pool.end());
    }
    trial.pool_size = pool.size();
    std::vector<PreparedRepresentation> pool_reps;
    if (!full_pool) {
      for (auto i : pool) pool_reps.push_back(candidates[i].representation);
    }

    std::vector<RankedList> ranked(q_idx.size());
    std::vector<std::uint8_t> need(q_idx.size(), 1);
    if (full_pool) {
      for (std::size_t j = 0; j < q_idx.size(); ++j) {
        if (auto it = cache.find(q_idx[j]); it != cache.end()) {
          ranked[j] = it->second;
          need[j] = 0;
        }
      }
    }
    const auto& reps = full_pool ? all_reps : pool_reps;
    parallel_for(q_idx.size(), threads, [&](std::size_t j) {
      if (need[j]) ranked[j] = rank_candidates(queries[q_idx[j]].representation, reps, 1);
    });
    if (full_pool) {
      for (std::size_t j = 0; j < q_idx.size(); ++j) cache.emplace(q_idx[j], ranked[j]);
    }

    // Per query and distinct subset: top-k relevance and pool validity.
    const std::size_t n_sub = subset_slot.size();
    std::vector<std::vector<QueryOutcome>> outcomes(n_sub, std::vector<QueryOutcome>(q_idx.size()));
    parallel_for(q_idx.size(), threads, [&](std::size_t j) {
      const auto& q = queries[q_idx[j]];
      const auto& ref = q.annotation.reference_object();
      for (const auto& [subset, slot] : subset_slot) {
        auto& o = outcomes[slot][j];
        for (std::size_t r = 0; r < std::min(spec.k, ranked[j].entries.size()); ++r) {
          const auto& c = candidates[cand_index.at(ranked[j].entries[r].candidate_id)];
          o.relevant.push_back(attribute_match(ref, c.annotation, subset, schema) ? 1 : 0);
        }
        bool valid = false;
        for (std::size_t r = 0; r < pool.size() && !valid; ++r) {
          valid = attribute_match(ref, candidates[pool[r]].annotation, subset, schema);
        }
        o.has_valid_candidate = valid;
      }
    });

    std::vector<SubsetMetrics> per_subset(n_sub);
    for (const auto& [subset, slot] : subset_slot) {
      auto& m = per_subset[slot];
      m.subset = subset_name(subset);
      double tp = 0.0, wp = 0.0;
      for (const auto& o : outcomes[slot]) {
        tp += top_k_precision(o.relevant, spec.k);
        wp += weighted_precision(o.relevant, spec.k);
      }
      m.top_k_precision = tp / static_cast<double>(q_idx.size());
      m.weighted_precision = wp / static_cast<double>(q_idx.size());
      const auto er = error_rate(outcomes[slot], spec.k);
      m.error_rate = er.rate;
      m.error_evaluated = er.evaluated;
      m.error_excluded = er.excluded;
    }

    for (const auto& f : families) {
      FamilyMetrics fm;
      fm.family = f.name;
      auto pick = [&](const AttributeSubset& s) -> const SubsetMetrics& { return per_subset[subset_slot.at(s)]; };
      for (const auto& s : f.subsets) fm.subsets.push_back(pick(s));
      fm.top_k_precision = powerset_eval(f.subsets, [&](const AttributeSubset& s) { return pick(s).top_k_precision; });
      fm.weighted_precision =
          powerset_eval(f.subsets, [&](const AttributeSubset& s) { return pick(s).weighted_precision; });
      fm.error_rate = powerset_eval(f.subsets, [&](const AttributeSubset& s) { return pick(s).error_rate; });
      trial.families.push_back(std::move(fm));
    }

    // Colour distance over the top k, for queries with a known foreground colour.
    double colour_sum = 0.0;
    std::size_t colour_n = 0;
    bool any_colour = false;
    for (std::size_t j = 0; j < q_idx.size(); ++j) {
      const auto& q = queries[q_idx[j]];
      if (!q.mean_rgb) {
        ++trial.colour_excluded;
        continue;
      }
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t r = 0; r < std::min(spec.k, ranked[j].entries.size()); ++r) {
        const auto& c = candidates[cand_index.at(ranked[j].entries[r].candidate_id)];
        if (!c.mean_rgb) {
          ++trial.colour_excluded;
          continue;
        }
        sum += colour_distance(*q.mean_rgb, *c.mean_rgb);
        ++n;
      }
      if (n > 0) {
        colour_sum += sum / static_cast<double>(n);
        ++colour_n;
        any_colour = true;
      }
    }
    if (any_colour) trial.colour_distance = colour_sum / static_cast<double>(colour_n);

    for (std::size_t j = 0; j < q_idx.size(); ++j) {
      trial.query_ids.push_back(queries[q_idx[j]].id);
      RankedList top{ranked[j].query_id, {}};
      for (std::size_t r = 0; r < std::min(spec.k, ranked[j].entries.size()); ++r) {
        top.entries.push_back(ranked[j].entries[r]);
      }
      trial.top_k.push_back(std::move(top));
    }
    report.trials.push_back(std::move(trial));
  }

  for (std::size_t f = 0; f < families.size(); ++f) {
    std::vector<double> tp, wp, er;
    for (const auto& t : report.trials) {
      tp.push_back(t.families[f].top_k_precision);
      wp.push_back(t.families[f].weighted_precision);
      er.push_back(t.families[f].error_rate);
    }
    report.summary.push_back({families[f].name, summarize(tp), summarize(wp), summarize(er)});
  }
  std::vector<double> cd;
  for (const auto& t : report.trials) {
    if (t.colour_distance) cd.push_back(*t.colour_distance);
  }
  if (!cd.empty()) report.colour_distance = summarize(cd);
  return report;
}

}  // namespace oadino::eval

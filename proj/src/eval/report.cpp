#include <cstdio>

#include "json.hpp"
#include "oadino/error.hpp"
#include "oadino/eval/eval.hpp"
#include "oadino/util/rng.hpp"

namespace oadino::eval {

namespace {

using Json = nlohmann::ordered_json;

Json summary_json(const Summary& s) { return Json{{"mean", s.mean}, {"std", s.std}}; }

std::string fixed(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

}  // namespace

std::string report_json(const MetricsReport& report) {
  Json j;
  j["format"] = "oadino-report";
  j["version"] = 1;
  j["metadata"] = {
      {"representation", report.representation},
      {"query_source", report.query_source},
      {"candidate_source", report.candidate_source},
      {"query_split_size", report.query_split_size},
      {"candidate_split_size", report.candidate_split_size},
      {"seed", report.spec.seed},
      {"k", report.spec.k},
      {"trials", report.spec.n_trials},
      {"queries_per_trial", report.spec.queries_per_trial},
      {"candidate_pool_size", report.spec.candidate_pool_size},
      {"trial_seed_rule", "seed + trial_index"},
      {"sampler", Rng::kAlgorithm},
      {"std_convention", "population (divide by number of trials)"},
  };

  Json summary = Json::array();
  for (const auto& f : report.summary) {
    summary.push_back({{"family", f.family},
                       {"top_k_precision", summary_json(f.top_k_precision)},
                       {"weighted_precision", summary_json(f.weighted_precision)},
                       {"error_rate", summary_json(f.error_rate)}});
  }
  j["summary"] = summary;
  j["colour_distance"] = report.colour_distance ? summary_json(*report.colour_distance) : Json(nullptr);

  Json trials = Json::array();
  for (const auto& t : report.trials) {
    Json jt;
    jt["trial"] = t.index;
    jt["seed"] = t.seed;
    jt["query_ids"] = t.query_ids;
    jt["candidates_ranked"] = t.pool_size;
    Json fams = Json::array();
    for (const auto& f : t.families) {
      Json subsets = Json::array();
      for (const auto& s : f.subsets) {
        subsets.push_back({{"subset", s.subset},
                           {"top_k_precision", s.top_k_precision},
                           {"weighted_precision", s.weighted_precision},
                           {"error_rate", s.error_rate},
                           {"error_rate_queries", s.error_evaluated},
                           {"excluded_queries", s.error_excluded}});
      }
      fams.push_back({{"family", f.family},
                      {"top_k_precision", f.top_k_precision},
                      {"weighted_precision", f.weighted_precision},
                      {"error_rate", f.error_rate},
                      {"subsets", subsets}});
    }
    jt["families"] = fams;
    jt["colour_distance"] = t.colour_distance ? Json(*t.colour_distance) : Json(nullptr);
    jt["colour_excluded"] = t.colour_excluded;
    Json rankings = Json::array();
    for (const auto& r : t.top_k) {
      Json entries = Json::array();
      for (const auto& e : r.entries) entries.push_back({{"candidate_id", e.candidate_id}, {"score", e.score}});
      rankings.push_back({{"query_id", r.query_id}, {"top_k", entries}});
    }
    jt["rankings"] = rankings;
    trials.push_back(jt);
  }
  j["trials"] = trials;
  return j.dump(2) + "\n";
}

std::string report_csv(const MetricsReport& report) {
  std::string out = "trial,family,subset,top_k_precision,weighted_precision,error_rate\n";
  for (const auto& t : report.trials) {
    for (const auto& f : t.families) {
      for (const auto& s : f.subsets) {
        out += std::to_string(t.index) + "," + f.family + "," + s.subset + "," + fixed(s.top_k_precision) + "," +
               fixed(s.weighted_precision) + "," + fixed(s.error_rate) + "\n";
      }
    }
  }
  for (const auto& f : report.summary) {
    out += "mean," + f.family + ",*," + fixed(f.top_k_precision.mean) + "," + fixed(f.weighted_precision.mean) + "," +
           fixed(f.error_rate.mean) + "\n";
    out += "std," + f.family + ",*," + fixed(f.top_k_precision.std) + "," + fixed(f.weighted_precision.std) + "," +
           fixed(f.error_rate.std) + "\n";
  }
  return out;
}

Image contact_sheet(const Image& query, std::span<const Image> retrieved, std::size_t cell, std::size_t gap) {
  if (cell == 0) throw ArgumentError("contact sheet cell must be positive");
  const std::size_t n = 1 + retrieved.size();
  Image sheet;
  sheet.id = query.id + "_contact";
  sheet.width = n * cell + (n - 1) * gap;
  sheet.height = cell;
  sheet.pixels.assign(sheet.width * sheet.height * Image::kChannels, 1.0f);
  auto paste = [&](const Image& src, std::size_t slot) {
    const Image scaled = resize_bilinear(src, cell, cell);
    const std::size_t x0 = slot * (cell + gap);
    for (std::size_t y = 0; y < cell; ++y) {
      for (std::size_t x = 0; x < cell; ++x) {
        for (std::size_t c = 0; c < Image::kChannels; ++c) {
          sheet.at(y, x0 + x, c) = scaled.at(y, x, c);
        }
      }
    }
  };
  paste(query, 0);
  for (std::size_t i = 0; i < retrieved.size(); ++i) paste(retrieved[i], i + 1);
  return sheet;
}

}  // namespace oadino::eval

// Copyright 2026 The decdial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Static content shipped with the library: the planning site list, feature
// table, preference templates, query synonyms, optimization names and
// mediation calendar constants. The JSON sources live in data/ and are
// compiled in.

#ifndef DECDIAL_DATA_HPP_
#define DECDIAL_DATA_HPP_

#include <algorithm>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "decdial/common.hpp"
#include "decdial/embedded_data.hpp"

namespace decdial {

enum class FeatureKind { boolean, categorical, rating };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::boolean;
  std::vector<std::string> labels;  // categorical
  std::vector<double> ratings;      // rating
  std::vector<std::string> categories;

  bool applies_to(const std::string& category) const {
    return std::find(categories.begin(), categories.end(), category) !=
           categories.end();
  }
};

struct SiteSeed {
  std::string name;
  std::string category;
  std::array<double, 2> loc{};
};

struct Catalog {
  std::vector<std::string> categories;
  std::vector<FeatureSpec> features;
  int features_per_site = 5;
  std::map<std::string, std::vector<int>> prices;
  std::vector<SiteSeed> sites;

  const FeatureSpec* find_feature(const std::string& name) const {
    for (const auto& f : features) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }
  const FeatureSpec& feature(const std::string& name) const {
    const FeatureSpec* f = find_feature(name);
    if (!f) throw DomainError("unknown feature: " + name);
    return *f;
  }
  bool is_category(const std::string& name) const {
    return std::find(categories.begin(), categories.end(), name) !=
           categories.end();
  }
};

struct BoolTemplate {
  std::string feature;
  bool value = true;
  std::string text;
};

struct PreferenceConfig {
  std::vector<BoolTemplate> bool_templates;
  std::map<std::string, std::string> categorical_templates;
  std::vector<double> rating_thresholds;
  int cuisine_min = 2;
  int cuisine_max = 4;
  std::string want_to_go;
  std::string at_least_one;
  std::string budget;
  std::string distance;
  std::vector<int> budget_values;
  double weight_feature = 0.7;
  double weight_want_to_go = 0.15;
  double weight_at_least_one = 0.15;
  std::vector<std::pair<std::string, bool>> excluded;

  bool is_excluded(const std::string& feature, bool value) const {
    return std::find(excluded.begin(), excluded.end(),
                     std::make_pair(feature, value)) != excluded.end();
  }
};

struct SynonymTarget {
  enum class Kind { feature, category } kind = Kind::feature;
  std::string name;
};

struct SynonymTable {
  std::map<std::string, SynonymTarget> phrases;
  std::vector<std::string> stopwords;

  bool is_stopword(const std::string& token) const {
    return std::find(stopwords.begin(), stopwords.end(), token) !=
           stopwords.end();
  }
};

struct NameLists {
  std::vector<std::string> reviewers;
  std::vector<std::string> papers;
};

struct MediationConfig {
  std::vector<std::string> carriers;
  int start_month = 5;
  int start_day = 31;
  int window_days = 3;
  std::vector<int> event_durations_min;
  int day_start_hour = 9;
  int day_end_hour = 21;
  int step_min = 30;
  int jitter_min_lo = 0;
  int jitter_min_hi = 2;
};

namespace detail {

inline Catalog parse_catalog(const json& features, const json& sites) {
  Catalog c;
  c.categories = features.at("categories").get<std::vector<std::string>>();
  c.features_per_site = features.at("features_per_site").get<int>();
  for (const auto& [cat, list] : features.at("prices").items()) {
    c.prices[cat] = list.get<std::vector<int>>();
  }
  for (const auto& f : features.at("features")) {
    FeatureSpec spec;
    spec.name = f.at("name").get<std::string>();
    const auto kind = f.at("kind").get<std::string>();
    if (kind == "bool") {
      spec.kind = FeatureKind::boolean;
    } else if (kind == "categorical") {
      spec.kind = FeatureKind::categorical;
      spec.labels = f.at("values").get<std::vector<std::string>>();
    } else if (kind == "rating") {
      spec.kind = FeatureKind::rating;
      spec.ratings = f.at("values").get<std::vector<double>>();
    } else {
      throw SchemaError("unknown feature kind: " + kind);
    }
    spec.categories = f.at("categories").get<std::vector<std::string>>();
    c.features.push_back(std::move(spec));
  }
  for (const auto& s : sites.at("sites")) {
    SiteSeed seed;
    seed.name = s.at("name").get<std::string>();
    seed.category = s.at("category").get<std::string>();
    seed.loc = {s.at("loc").at(0).get<double>(), s.at("loc").at(1).get<double>()};
    if (!c.is_category(seed.category)) {
      throw SchemaError("site " + seed.name + " has unknown category " +
                        seed.category);
    }
    c.sites.push_back(std::move(seed));
  }
  return c;
}

inline PreferenceConfig parse_preferences(const json& j) {
  PreferenceConfig p;
  for (const auto& t : j.at("bool_templates")) {
    p.bool_templates.push_back({t.at("feature").get<std::string>(),
                                t.at("value").get<bool>(),
                                t.at("text").get<std::string>()});
  }
  for (const auto& [k, v] : j.at("categorical_templates").items()) {
    p.categorical_templates[k] = v.get<std::string>();
  }
  p.rating_thresholds = j.at("rating_thresholds").get<std::vector<double>>();
  p.cuisine_min = j.at("cuisine_choices").at("min").get<int>();
  p.cuisine_max = j.at("cuisine_choices").at("max").get<int>();
  p.want_to_go = j.at("want_to_go").get<std::string>();
  p.at_least_one = j.at("at_least_one").get<std::string>();
  p.budget = j.at("budget").get<std::string>();
  p.distance = j.at("distance").get<std::string>();
  p.budget_values = j.at("budget_values").get<std::vector<int>>();
  const auto& w = j.at("type_weights");
  p.weight_feature = w.at("feature").get<double>();
  p.weight_want_to_go = w.at("want_to_go").get<double>();
  p.weight_at_least_one = w.at("at_least_one").get<double>();
  for (const auto& e : j.at("excluded")) {
    p.excluded.emplace_back(e.at("feature").get<std::string>(),
                            e.at("value").get<bool>());
  }
  return p;
}

inline SynonymTable parse_synonyms(const json& j) {
  SynonymTable t;
  for (const auto& [phrase, target] : j.at("phrases").items()) {
    SynonymTarget s;
    if (target.contains("feature")) {
      s.kind = SynonymTarget::Kind::feature;
      s.name = target.at("feature").get<std::string>();
    } else {
      s.kind = SynonymTarget::Kind::category;
      s.name = target.at("category").get<std::string>();
    }
    t.phrases[to_lower(phrase)] = s;
  }
  t.stopwords = j.at("stopwords").get<std::vector<std::string>>();
  return t;
}

inline MediationConfig parse_mediation(const json& j) {
  MediationConfig m;
  m.carriers = j.at("carriers").get<std::vector<std::string>>();
  m.start_month = j.at("window_start").at("month").get<int>();
  m.start_day = j.at("window_start").at("day").get<int>();
  m.window_days = j.at("window_days").get<int>();
  m.event_durations_min = j.at("event_durations_min").get<std::vector<int>>();
  m.day_start_hour = j.at("day_start_hour").get<int>();
  m.day_end_hour = j.at("day_end_hour").get<int>();
  m.step_min = j.at("step_min").get<int>();
  m.jitter_min_lo = j.at("flight_duration_jitter_min").at(0).get<int>();
  m.jitter_min_hi = j.at("flight_duration_jitter_min").at(1).get<int>();
  return m;
}

}  // namespace detail

inline const Catalog& catalog() {
  static const Catalog c =
      detail::parse_catalog(json::parse(embedded::features_json),
                            json::parse(embedded::sites_json));
  return c;
}

inline const PreferenceConfig& preference_config() {
  static const PreferenceConfig p =
      detail::parse_preferences(json::parse(embedded::preferences_json));
  return p;
}

inline const SynonymTable& synonyms() {
  static const SynonymTable t =
      detail::parse_synonyms(json::parse(embedded::synonyms_json));
  return t;
}

inline const NameLists& optimization_names() {
  static const NameLists n = [] {
    const json j = json::parse(embedded::optimization_names_json);
    return NameLists{j.at("reviewers").get<std::vector<std::string>>(),
                     j.at("papers").get<std::vector<std::string>>()};
  }();
  return n;
}

inline const MediationConfig& mediation_config() {
  static const MediationConfig m =
      detail::parse_mediation(json::parse(embedded::mediation_json));
  return m;
}

}  // namespace decdial

#endif  // DECDIAL_DATA_HPP_

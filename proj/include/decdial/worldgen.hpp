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

// Seeded world generation. Every generator is a pure function of its
// arguments.

#ifndef DECDIAL_WORLDGEN_HPP_
#define DECDIAL_WORLDGEN_HPP_

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "decdial/data.hpp"
#include "decdial/reward.hpp"
#include "decdial/rng.hpp"
#include "decdial/solvers.hpp"
#include "decdial/worlds.hpp"

namespace decdial {

inline constexpr int kRejectionBudget = 10000;
inline constexpr double kRequiredRatio = 1.25;

namespace detail {

inline std::string last_name(const std::string& full) {
  const auto pos = full.rfind(' ');
  return pos == std::string::npos ? full : full.substr(pos + 1);
}

inline std::string fill(std::string tmpl, const std::string& key,
                        const std::string& value) {
  const std::string needle = "{" + key + "}";
  const auto pos = tmpl.find(needle);
  if (pos != std::string::npos) tmpl.replace(pos, needle.size(), value);
  return tmpl;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Optimization

inline OptimizationWorld gen_optimization(std::uint64_t seed, int k = 8,
                                          double p_observed = 0.4) {
  const auto& names = optimization_names();
  if (k < 2) throw DomainError("k must be at least 2");
  if (k > static_cast<int>(names.reviewers.size()) ||
      k > static_cast<int>(names.papers.size())) {
    throw DomainError("k exceeds the available reviewer and paper names");
  }
  if (!(p_observed > 0.0 && p_observed < 1.0)) {
    throw DomainError("p_observed must be in (0, 1)");
  }
  Rng rng(seed);
  OptimizationWorld w;
  w.seed = seed;
  w.params = {k, p_observed};
  for (std::size_t i : rng.sample_indices(names.reviewers.size(), k)) {
    w.reviewers.push_back(names.reviewers[i]);
  }
  for (std::size_t i : rng.sample_indices(names.papers.size(), k)) {
    w.papers.push_back(names.papers[i]);
  }
  std::sort(w.reviewers.begin(), w.reviewers.end(),
            [](const std::string& a, const std::string& b) {
              return std::make_pair(detail::last_name(a), a) <
                     std::make_pair(detail::last_name(b), b);
            });
  std::sort(w.papers.begin(), w.papers.end());

  for (int attempt = 1; attempt <= kRejectionBudget; ++attempt) {
    w.table.assign(k, std::vector<double>(k, 0.0));
    for (auto& row : w.table) {
      for (double& cell : row) cell = rng.uniform(0.0, 100.0);
    }
    for (auto& mask : w.masks) {
      mask.assign(k, std::vector<bool>(k, false));
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) mask[i][j] = rng.bernoulli(p_observed);
      }
    }
    for (double& s : w.scales) s = rng.uniform(1.0, 10.0);
    w.attempts = attempt;
    if (pooling_pays_off(w, kRequiredRatio)) return w;
  }
  throw GenerationError("optimization rejection budget exhausted", seed);
}

// Value a player sees for a cell: true value times that player's scale.
inline long long displayed_value(double value, double scale) {
  return display_round(value * scale);
}

// ---------------------------------------------------------------------------
// Planning

namespace detail {

inline std::vector<Site> gen_sites(Rng& rng) {
  const Catalog& cat = catalog();
  std::vector<std::array<double, 2>> locs;
  for (const auto& s : cat.sites) locs.push_back(s.loc);
  rng.shuffle(locs);
  std::vector<Site> sites;
  for (std::size_t i = 0; i < cat.sites.size(); ++i) {
    Site site;
    site.name = cat.sites[i].name;
    site.category = cat.sites[i].category;
    site.loc = locs[i];
    std::vector<const FeatureSpec*> legal;
    for (const auto& f : cat.features) {
      if (f.applies_to(site.category)) legal.push_back(&f);
    }
    const std::size_t count =
        std::min<std::size_t>(legal.size(), static_cast<std::size_t>(cat.features_per_site));
    for (std::size_t idx : rng.sample_indices(legal.size(), count)) {
      const FeatureSpec& f = *legal[idx];
      switch (f.kind) {
        case FeatureKind::boolean: site.features[f.name] = rng.bernoulli(0.5); break;
        case FeatureKind::categorical: site.features[f.name] = rng.pick(f.labels); break;
        case FeatureKind::rating: site.features[f.name] = rng.pick(f.ratings); break;
      }
    }
    site.price = rng.pick(cat.prices.at(site.category));
    sites.push_back(std::move(site));
  }
  return sites;
}

inline Preference gen_feature_preference(Rng& rng, const std::string& feature) {
  const Catalog& cat = catalog();
  const PreferenceConfig& cfg = preference_config();
  const FeatureSpec& spec = cat.feature(feature);
  Preference p;
  p.type = PreferenceType::feature;
  p.feature = feature;
  if (spec.kind == FeatureKind::boolean) {
    std::vector<const BoolTemplate*> options;
    for (const auto& t : cfg.bool_templates) {
      if (t.feature == feature && !cfg.is_excluded(t.feature, t.value)) options.push_back(&t);
    }
    const BoolTemplate& t = *rng.pick(options);
    p.flag = t.value;
    p.text = t.text;
  } else if (spec.kind == FeatureKind::rating) {
    p.min_rating = rng.pick(cfg.rating_thresholds);
    p.text = fill(cfg.categorical_templates.at(feature), "value", format_number(p.min_rating));
  } else if (feature == "cuisine") {
    const int n = static_cast<int>(rng.uniform_int(cfg.cuisine_min, cfg.cuisine_max));
    for (std::size_t i : rng.sample_indices(spec.labels.size(), n)) {
      p.labels.push_back(spec.labels[i]);
    }
    p.text = fill(cfg.categorical_templates.at(feature), "values", join(p.labels, ", "));
  } else {
    p.labels = {rng.pick(spec.labels)};
    p.text = fill(cfg.categorical_templates.at(feature), "value", p.labels[0]);
  }
  return p;
}

// Features that can carry a preference: those with a usable template.
inline std::vector<std::string> preference_features() {
  const PreferenceConfig& cfg = preference_config();
  std::vector<std::string> out;
  for (const auto& t : cfg.bool_templates) {
    if (cfg.is_excluded(t.feature, t.value)) continue;
    if (std::find(out.begin(), out.end(), t.feature) == out.end()) out.push_back(t.feature);
  }
  for (const auto& [feature, tmpl] : cfg.categorical_templates) {
    if (std::find(out.begin(), out.end(), feature) == out.end()) out.push_back(feature);
  }
  return out;
}

inline std::vector<Preference> gen_preferences(Rng& rng, const std::vector<Site>& sites,
                                               int s) {
  const Catalog& cat = catalog();
  const PreferenceConfig& cfg = preference_config();
  std::vector<Preference> extras;
  const int max_extra = std::max(0, s - 2);
  const int min_extra = (max_extra + 1) / 2;
  const int n_extra = static_cast<int>(rng.uniform_int(min_extra, max_extra));
  std::vector<std::string> features = preference_features();
  bool has_want = false;
  bool has_category = false;
  const double total_weight =
      cfg.weight_feature + cfg.weight_want_to_go + cfg.weight_at_least_one;
  for (int guard = 0; static_cast<int>(extras.size()) < n_extra && guard < 1000; ++guard) {
    const double r = rng.uniform(0.0, total_weight);
    if (r < cfg.weight_feature) {
      if (features.empty()) continue;
      const std::size_t idx = rng.index(features.size());
      extras.push_back(gen_feature_preference(rng, features[idx]));
      features.erase(features.begin() + static_cast<std::ptrdiff_t>(idx));
    } else if (r < cfg.weight_feature + cfg.weight_want_to_go) {
      if (has_want) continue;
      has_want = true;
      Preference p;
      p.type = PreferenceType::want_to_go;
      p.site = static_cast<int>(rng.index(sites.size()));
      p.text = detail::fill(cfg.want_to_go, "site", sites[p.site].name);
      extras.push_back(std::move(p));
    } else {
      if (has_category) continue;
      has_category = true;
      Preference p;
      p.type = PreferenceType::at_least_one;
      p.category = rng.pick(cat.categories);
      p.text = detail::fill(cfg.at_least_one, "category", p.category);
      extras.push_back(std::move(p));
    }
  }

  Preference budget;
  budget.type = PreferenceType::budget;
  budget.budget = rng.pick(cfg.budget_values);
  budget.text = detail::fill(cfg.budget, "budget", std::to_string(budget.budget));
  extras.push_back(std::move(budget));
  rng.shuffle(extras);

  Preference distance;
  distance.type = PreferenceType::distance;
  distance.text = cfg.distance;
  extras.push_back(std::move(distance));
  for (auto& p : extras) p.weight = rng.uniform(1.0, 10.0);
  return extras;
}

// True when at least two full itineraries score differently, so range
// normalization is well defined.
inline bool has_score_spread(const PlanningWorld& w) {
  const ItineraryEvaluator eval(w);
  bool first = true;
  double ref = 0.0;
  bool spread = false;
  const int n = static_cast<int>(w.sites.size());
  // Stop early: the very first differing tuple settles it.
  try {
    for_each_ordered_tuple(n, std::min(w.k(), n), [&](const std::vector<int>& t) {
      const double v = eval(t);
      if (first) {
        ref = v;
        first = false;
      } else if (v != ref) {
        spread = true;
        throw 0;
      }
    });
  } catch (int) {
  }
  return spread;
}

}  // namespace detail

inline PlanningWorld gen_planning(std::uint64_t seed, int k = 3, int s = 10,
                                  double miles_per_unit = 69.0) {
  const int n = static_cast<int>(catalog().sites.size());
  if (k < 1 || k > n) throw DomainError("k must be in [1, site count]");
  if (s < 2) throw DomainError("s must allow the price and distance preferences");
  if (!(miles_per_unit > 0.0)) throw DomainError("miles_per_unit must be positive");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    PlanningWorld w;
    w.seed = seed;
    w.params = {k, s, miles_per_unit};
    w.sites = detail::gen_sites(rng);
    w.preferences = detail::gen_preferences(rng, w.sites, s);
    if (detail::has_score_spread(w)) return w;
  }
  throw GenerationError("planning world has no score spread", seed);
}

// ---------------------------------------------------------------------------
// Mediation

namespace detail {

inline std::vector<CalendarEvent> gen_calendar(Rng& rng, double p_event, double f_shared) {
  const MediationConfig& cfg = mediation_config();
  std::vector<CalendarEvent> events;
  for (int day = 0; day < cfg.window_days; ++day) {
    const int first = day * 1440 + cfg.day_start_hour * 60;
    const int last = day * 1440 + cfg.day_end_hour * 60;
    for (int t = first; t < last; t += cfg.step_min) {
      if (!rng.bernoulli(p_event)) continue;
      const int duration = rng.pick(cfg.event_durations_min);
      const CalendarEvent e{t, t + duration, 0, false};
      const bool clash = std::any_of(events.begin(), events.end(), [&](const CalendarEvent& o) {
        return e.start < o.end && o.start < e.end;
      });
      if (clash) continue;
      CalendarEvent placed = e;
      placed.importance = static_cast<int>(rng.uniform_int(1, 10));
      events.push_back(placed);
    }
  }
  // Round half to even, so 13.5 -> 14 and 10.5 -> 10.
  const int old_mode = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const auto n_shared = static_cast<std::size_t>(
      std::nearbyint(f_shared * static_cast<double>(events.size())));
  std::fesetround(old_mode);
  for (std::size_t i : rng.sample_indices(events.size(), n_shared)) events[i].shared = true;
  return events;
}

inline MediationUser gen_user(Rng& rng, const MediationParams& params) {
  const MediationConfig& cfg = mediation_config();
  MediationUser u;
  u.events = gen_calendar(rng, params.p_event, params.f_shared);
  u.price_mu = rng.uniform(50.0, 1000.0);
  u.price_sigma = u.price_mu;
  const double base_hours = rng.uniform(1.0, 10.0);
  const int window = cfg.window_days * 1440;
  for (int i = 0; i < params.F; ++i) {
    Flight f;
    f.carrier = rng.pick(cfg.carriers);
    f.depart = static_cast<int>(rng.uniform_int(0, window - 1));
    int duration = static_cast<int>(std::lround(base_hours * 60.0)) +
                   static_cast<int>(rng.uniform_int(cfg.jitter_min_lo, cfg.jitter_min_hi));
    duration = std::clamp(duration, 60, 600);
    f.arrive = f.depart + duration;
    f.price = std::max(50, static_cast<int>(std::lround(rng.normal(u.price_mu, u.price_sigma))));
    u.flights.push_back(std::move(f));
  }
  std::stable_sort(u.flights.begin(), u.flights.end(), [](const Flight& a, const Flight& b) {
    return a.depart < b.depart;
  });
  for (std::size_t i = 0; i < u.flights.size(); ++i) u.flights[i].id = static_cast<int>(i);
  return u;
}

}  // namespace detail

inline MediationWorld gen_mediation(std::uint64_t seed, double p_event = 0.35,
                                    double f_shared = 0.75, int F = 30) {
  if (!(p_event >= 0.0 && p_event <= 1.0)) throw DomainError("p_event must be in [0, 1]");
  if (!(f_shared >= 0.0 && f_shared <= 1.0)) throw DomainError("f_shared must be in [0, 1]");
  if (F < 1) throw DomainError("F must be positive");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    MediationWorld w;
    w.seed = seed;
    w.params = {p_event, f_shared, F};
    w.users[0] = detail::gen_user(rng, w.params);
    w.users[1] = detail::gen_user(rng, w.params);
    w.theta_price = rng.uniform(1.0, 20.0);
    w.theta_arrival = rng.uniform(1.0, 10.0);
    const auto [best, worst] = best_worst_flightpair(w);
    if (best.value > worst.value) return w;
  }
  throw GenerationError("mediation world has no score spread", seed);
}

// ---------------------------------------------------------------------------

inline json default_params(TaskId task) {
  switch (task) {
    case TaskId::optimization: return {{"k", 8}, {"p_observed", 0.4}};
    case TaskId::planning: return {{"k", 3}, {"s", 10}, {"miles_per_unit", 69.0}};
    case TaskId::mediation: return {{"p_event", 0.35}, {"f_shared", 0.75}, {"F", 30}};
  }
  return json::object();
}

// Generates a world from a task, seed and (possibly partial) parameters.
inline World generate(TaskId task, std::uint64_t seed, const json& params = json::object()) {
  json p = default_params(task);
  if (params.is_object()) {
    for (const auto& [key, value] : params.items()) {
      if (!p.contains(key)) {
        throw DomainError("unknown parameter for " + std::string(to_string(task)) + ": " + key);
      }
      p[key] = value;
    }
  }
  try {
    switch (task) {
      case TaskId::optimization:
        return gen_optimization(seed, p.at("k").get<int>(), p.at("p_observed").get<double>());
      case TaskId::planning:
        return gen_planning(seed, p.at("k").get<int>(), p.at("s").get<int>(),
                            p.at("miles_per_unit").get<double>());
      case TaskId::mediation:
        return gen_mediation(seed, p.at("p_event").get<double>(),
                             p.at("f_shared").get<double>(), p.at("F").get<int>());
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad parameter: ") + e.what());
  }
  throw DomainError("unknown task");
}

}  // namespace decdial

#endif  // DECDIAL_WORLDGEN_HPP_

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

// Raw (unnormalized) rewards and their itemized breakdowns.

#ifndef DECDIAL_REWARD_HPP_
#define DECDIAL_REWARD_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "decdial/decisions.hpp"
#include "decdial/worlds.hpp"

namespace decdial {

struct BreakdownLine {
  std::string label;
  double score = 0.0;
  std::vector<std::string> details;
  bool placeholder = false;  // an "Empty" slot
};

struct ChecklistLine {
  bool satisfied = false;
  std::string label;
  double score = 0.0;
};

struct RewardBreakdown {
  std::string heading;
  std::vector<BreakdownLine> components;
  std::vector<ChecklistLine> checklist;
  double total = 0.0;

  double component_sum() const {
    double s = 0.0;
    for (const auto& c : components) s += c.score;
    for (const auto& c : checklist) s += c.score;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Optimization

enum class Provenance { observed_by_0, observed_by_1, observed_by_both, imputed };

inline constexpr double kPriorMean = 50.0;

struct ImputedTable {
  Matrix values;
  std::vector<std::vector<Provenance>> provenance;
};

inline ImputedTable impute_pooled(const OptimizationWorld& w) {
  const int k = w.k();
  ImputedTable t;
  t.values.assign(k, std::vector<double>(k, kPriorMean));
  t.provenance.assign(k, std::vector<Provenance>(k, Provenance::imputed));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const bool a = w.masks[0][i][j];
      const bool b = w.masks[1][i][j];
      if (a || b) t.values[i][j] = w.table[i][j];
      if (a && b) {
        t.provenance[i][j] = Provenance::observed_by_both;
      } else if (a) {
        t.provenance[i][j] = Provenance::observed_by_0;
      } else if (b) {
        t.provenance[i][j] = Provenance::observed_by_1;
      }
    }
  }
  return t;
}

// One player's belief: own observations, prior mean elsewhere.
inline Matrix impute_solo(const OptimizationWorld& w, int player) {
  const int k = w.k();
  Matrix m(k, std::vector<double>(k, kPriorMean));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (w.masks.at(player)[i][j]) m[i][j] = w.table[i][j];
    }
  }
  return m;
}

inline void check_permutation(const Matching& m, int k) {
  if (static_cast<int>(m.assignment.size()) != k) {
    throw SchemaError("a matching must assign all " + std::to_string(k) +
                      " reviewers");
  }
  std::vector<bool> used(k, false);
  for (int i = 0; i < k; ++i) {
    const int p = m.assignment[i];
    if (p < 0 || p >= k) {
      throw SchemaError("reviewer " + std::to_string(i) + " has no valid paper");
    }
    if (used[p]) {
      throw SchemaError("paper " + std::to_string(p) + " is assigned twice");
    }
    used[p] = true;
  }
}

// Sum of matched cells, accumulated in reviewer order.
inline double matching_value(const Matrix& table, const Matching& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.assignment.size(); ++i) {
    s += table[i][m.assignment[i]];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Planning

inline constexpr const char* kEmptySlot = "Empty";

inline double feature_preference_score(const Preference& p, const Site& site) {
  const FeatureValue* v = site.find(p.feature);
  if (!v) return 0.0;
  bool match = false;
  if (const bool* b = std::get_if<bool>(v)) {
    match = *b == p.flag;
  } else if (const double* r = std::get_if<double>(v)) {
    match = *r >= p.min_rating;
  } else {
    const auto& label = std::get<std::string>(*v);
    match = std::find(p.labels.begin(), p.labels.end(), label) != p.labels.end();
  }
  return match ? p.weight : -p.weight;
}

inline double site_score(const PlanningWorld& w, int site) {
  double s = 0.0;
  for (const auto& p : w.preferences) {
    if (p.type == PreferenceType::feature) s += feature_preference_score(p, w.sites.at(site));
  }
  return s;
}

inline double distance_weight(const PlanningWorld& w) {
  for (const auto& p : w.preferences) {
    if (p.type == PreferenceType::distance) return p.weight;
  }
  return 0.0;
}

// "0.8mi", with whole numbers printed bare ("0mi").
inline std::string format_miles(double miles) {
  const double r = std::round(miles * 10.0) / 10.0;
  if (r == std::floor(r)) return std::to_string(static_cast<long long>(r)) + "mi";
  return format_tenths(r) + "mi";
}

inline void check_itinerary(const PlanningWorld& w, const Itinerary& it) {
  if (static_cast<int>(it.slots.size()) != w.k()) {
    throw SchemaError("an itinerary has exactly " + std::to_string(w.k()) +
                      " slots");
  }
  std::vector<bool> seen(w.sites.size(), false);
  for (std::size_t i = 0; i < it.slots.size(); ++i) {
    if (!it.slots[i]) continue;
    const int s = *it.slots[i];
    if (s < 0 || s >= static_cast<int>(w.sites.size())) {
      throw DomainError("slot " + std::to_string(i + 1) + " names an unknown site");
    }
    if (seen[s]) {
      throw SchemaError("slot " + std::to_string(i + 1) + " repeats " +
                        w.sites[s].name);
    }
    seen[s] = true;
  }
}

inline RewardBreakdown planning_breakdown(const PlanningWorld& w,
                                          const Itinerary& it) {
  check_itinerary(w, it);
  RewardBreakdown b;
  b.heading = "Proposal Score:";
  const double theta_distance = distance_weight(w);
  const int k = w.k();
  for (int i = 0; i < k; ++i) {
    if (it.slots[i]) {
      const Site& site = w.sites[*it.slots[i]];
      BreakdownLine line{site.name, site_score(w, *it.slots[i]), {}, false};
      for (const auto& [name, v] : site.features) {
        line.details.push_back(name + ": " + feature_value_text(v));
      }
      b.components.push_back(std::move(line));
    } else {
      b.components.push_back({kEmptySlot, 0.0, {}, true});
    }
    if (i + 1 < k) {
      if (it.slots[i] && it.slots[i + 1]) {
        const int a = *it.slots[i];
        const int c = *it.slots[i + 1];
        const double miles = w.miles(a, c);
        b.components.push_back({"Travel from " + w.sites[a].name + " to " +
                                    w.sites[c].name + ", " + format_miles(miles),
                                -theta_distance * miles, {}, false});
      } else {
        b.components.push_back({kEmptySlot, 0.0, {}, true});
      }
    }
  }

  int total_price = 0;
  for (const auto& s : it.slots) {
    if (s) total_price += w.sites[*s].price;
  }
  const PreferenceType order[] = {PreferenceType::budget, PreferenceType::want_to_go,
                                  PreferenceType::at_least_one};
  for (PreferenceType type : order) {
    for (const auto& p : w.preferences) {
      if (p.type != type) continue;
      bool ok = false;
      if (type == PreferenceType::budget) {
        ok = total_price <= p.budget;
        b.checklist.push_back({ok, p.text, ok ? 0.0 : -p.weight});
        continue;
      }
      for (const auto& s : it.slots) {
        if (!s) continue;
        if (type == PreferenceType::want_to_go && *s == p.site) ok = true;
        if (type == PreferenceType::at_least_one && w.sites[*s].category == p.category) {
          ok = true;
        }
      }
      b.checklist.push_back({ok, p.text, ok ? p.weight : -p.weight});
    }
  }
  b.total = b.component_sum();
  return b;
}

inline double itinerary_reward(const PlanningWorld& w, const Itinerary& it) {
  return planning_breakdown(w, it).total;
}

inline bool itinerary_is_full(const Itinerary& it) {
  for (const auto& s : it.slots) {
    if (!s) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Mediation

inline constexpr const char* kMeetingsLabel = "Try not to skip important meetings";
inline constexpr const char* kPriceLabel = "Get a good deal on the flight price";
inline constexpr const char* kClosenessLabel = "Have everyone arrive around the same time";

// Half-open intervals: an event ending exactly at departure is not missed.
inline bool overlaps(const CalendarEvent& e, const Flight& f) {
  return e.start < f.arrive && f.depart < e.end;
}

inline const Flight& flight_of(const MediationWorld& w, int user, int id) {
  const auto& flights = w.users.at(user).flights;
  if (id < 0 || id >= static_cast<int>(flights.size())) {
    throw DomainError("user " + std::to_string(user) + " has no flight " +
                      std::to_string(id));
  }
  return flights[id];
}

inline double meetings_component(const MediationWorld& w, int user, const Flight& f) {
  double s = 0.0;
  for (const auto& e : w.users[user].events) {
    if (overlaps(e, f)) s -= e.importance;
  }
  return s;
}

inline double price_component(const MediationWorld& w, int user, const Flight& f) {
  const auto& u = w.users[user];
  return w.theta_price * (u.price_mu - f.price) / u.price_sigma;
}

// Joint closeness penalty for both users.
inline double closeness_penalty(const MediationWorld& w, const Flight& a,
                                const Flight& b) {
  return -w.theta_arrival * std::fabs(a.arrive - b.arrive) / 60.0;
}

// Scorecard for one user; closeness appears only when the other user's
// flight is known.
inline RewardBreakdown flight_breakdown(const MediationWorld& w, int user,
                                        int flight,
                                        std::optional<int> other_flight) {
  const Flight& f = flight_of(w, user, flight);
  RewardBreakdown b;
  b.heading = format_flight_row(f);
  BreakdownLine meetings{kMeetingsLabel, meetings_component(w, user, f), {}, false};
  for (const auto& e : w.users[user].events) {
    if (overlaps(e, f)) {
      meetings.details.push_back("(" + std::to_string(e.importance) + ") | " +
                                 format_event_times(e));
    }
  }
  b.components.push_back(std::move(meetings));
  b.components.push_back({kPriceLabel, price_component(w, user, f), {}, false});
  if (other_flight) {
    const Flight& g = flight_of(w, 1 - user, *other_flight);
    b.components.push_back({kClosenessLabel, closeness_penalty(w, f, g) / 2.0, {}, false});
  }
  b.total = b.component_sum();
  return b;
}

inline double flights_reward(const MediationWorld& w, int flight0, int flight1) {
  const Flight& a = flight_of(w, 0, flight0);
  const Flight& b = flight_of(w, 1, flight1);
  return meetings_component(w, 0, a) + price_component(w, 0, a) +
         meetings_component(w, 1, b) + price_component(w, 1, b) +
         closeness_penalty(w, a, b);
}

}  // namespace decdial

#endif  // DECDIAL_REWARD_HPP_

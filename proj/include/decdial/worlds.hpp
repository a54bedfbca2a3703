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

// Hidden world state for the three tasks and its JSON form. A world document
// carries everything needed to score decisions without regenerating.

#ifndef DECDIAL_WORLDS_HPP_
#define DECDIAL_WORLDS_HPP_

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "decdial/common.hpp"
#include "decdial/data.hpp"

namespace decdial {

using Matrix = std::vector<std::vector<double>>;
using Mask = std::vector<std::vector<bool>>;

// ---------------------------------------------------------------------------
// Optimization

struct OptimizationParams {
  int k = 8;
  double p_observed = 0.4;
};

struct OptimizationWorld {
  std::uint64_t seed = 0;
  OptimizationParams params;
  Matrix table;                 // rows are reviewers, columns are papers
  std::array<Mask, 2> masks;
  std::array<double, 2> scales{1.0, 1.0};
  std::vector<std::string> reviewers;
  std::vector<std::string> papers;
  int attempts = 1;             // rejection-sampling draws used

  int k() const { return params.k; }
};

// Display name used in proposals: the title up to the first colon.
inline std::string paper_short_name(const std::string& title) {
  const auto pos = title.find(':');
  return pos == std::string::npos ? title : title.substr(0, pos);
}

// ---------------------------------------------------------------------------
// Planning

using FeatureValue = std::variant<bool, double, std::string>;

inline std::string feature_value_text(const FeatureValue& v) {
  if (const bool* b = std::get_if<bool>(&v)) return *b ? "True" : "False";
  if (const double* d = std::get_if<double>(&v)) return format_number(*d);
  return std::get<std::string>(v);
}

struct Site {
  std::string name;
  std::string category;
  int price = 0;
  std::array<double, 2> loc{};
  std::map<std::string, FeatureValue> features;

  const FeatureValue* find(const std::string& feature) const {
    const auto it = features.find(feature);
    return it == features.end() ? nullptr : &it->second;
  }
};

enum class PreferenceType { feature, want_to_go, budget, at_least_one, distance };

inline std::string_view to_string(PreferenceType t) {
  switch (t) {
    case PreferenceType::feature: return "feature";
    case PreferenceType::want_to_go: return "want_to_go";
    case PreferenceType::budget: return "budget";
    case PreferenceType::at_least_one: return "at_least_one";
    case PreferenceType::distance: return "distance";
  }
  return "unknown";
}

inline PreferenceType preference_type_from_string(std::string_view s) {
  if (s == "feature") return PreferenceType::feature;
  if (s == "want_to_go") return PreferenceType::want_to_go;
  if (s == "budget") return PreferenceType::budget;
  if (s == "at_least_one") return PreferenceType::at_least_one;
  if (s == "distance") return PreferenceType::distance;
  throw SchemaError("unknown preference type: " + std::string(s));
}

struct Preference {
  PreferenceType type = PreferenceType::feature;
  double weight = 1.0;
  std::string text;
  // feature
  std::string feature;
  bool flag = true;                  // boolean features
  std::vector<std::string> labels;   // categorical features, any-of
  double min_rating = 0.0;           // rating feature
  // want_to_go / at_least_one / budget
  int site = -1;
  std::string category;
  int budget = 0;
};

struct PlanningParams {
  int k = 3;
  int s = 10;
  double miles_per_unit = 69.0;
};

struct PlanningWorld {
  std::uint64_t seed = 0;
  PlanningParams params;
  std::vector<Site> sites;
  std::vector<Preference> preferences;

  int k() const { return params.k; }

  int site_index(const std::string& name) const {
    const std::string wanted = to_lower(trim(name));
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (to_lower(sites[i].name) == wanted) return static_cast<int>(i);
    }
    return -1;
  }

  double miles(int a, int b) const {
    const auto& p = sites.at(a).loc;
    const auto& q = sites.at(b).loc;
    return std::hypot(p[0] - q[0], p[1] - q[1]) * params.miles_per_unit;
  }
};

// ---------------------------------------------------------------------------
// Mediation. Times are minutes since midnight at the start of the window.

struct Flight {
  int id = 0;
  std::string carrier;
  int price = 0;
  int depart = 0;
  int arrive = 0;
};

struct CalendarEvent {
  int start = 0;
  int end = 0;
  int importance = 1;
  bool shared = false;
};

struct MediationUser {
  std::vector<Flight> flights;
  std::vector<CalendarEvent> events;  // sorted by start
  double price_mu = 0.0;
  double price_sigma = 1.0;

  std::vector<CalendarEvent> calendar(bool shared) const {
    std::vector<CalendarEvent> out;
    for (const auto& e : events) {
      if (e.shared == shared) out.push_back(e);
    }
    return out;
  }
};

struct MediationParams {
  double p_event = 0.35;
  double f_shared = 0.75;
  int F = 30;
};

struct MediationWorld {
  std::uint64_t seed = 0;
  MediationParams params;
  std::array<MediationUser, 2> users;
  double theta_price = 1.0;
  double theta_arrival = 1.0;
};

using World = std::variant<OptimizationWorld, PlanningWorld, MediationWorld>;

inline TaskId task_of(const World& w) {
  return static_cast<TaskId>(w.index());
}

inline std::uint64_t seed_of(const World& w) {
  return std::visit([](const auto& x) { return x.seed; }, w);
}

// ---------------------------------------------------------------------------
// Clock formatting for the mediation window.

inline std::chrono::sys_days window_day(int day_offset) {
  const auto& cfg = mediation_config();
  using namespace std::chrono;
  // A fixed non-leap year keeps month/day arithmetic well defined.
  const sys_days start = year{2023} / month{static_cast<unsigned>(cfg.start_month)} /
                         day{static_cast<unsigned>(cfg.start_day)};
  return start + days{day_offset};
}

// "5/31" for the calendar day containing the given minute.
inline std::string format_date(int minutes) {
  const int day_offset = minutes >= 0 ? minutes / 1440 : -((-minutes + 1439) / 1440);
  const std::chrono::year_month_day ymd{window_day(day_offset)};
  return std::to_string(static_cast<unsigned>(ymd.month())) + "/" +
         std::to_string(static_cast<unsigned>(ymd.day()));
}

// "12:34 PM"; with compact set, whole hours drop the minutes ("2 PM").
inline std::string format_clock(int minutes, bool compact) {
  int m = minutes % 1440;
  if (m < 0) m += 1440;
  const int hour24 = m / 60;
  const int minute = m % 60;
  const int hour12 = hour24 % 12 == 0 ? 12 : hour24 % 12;
  std::string out = std::to_string(hour12);
  if (!compact || minute != 0) {
    out += ':';
    if (minute < 10) out += '0';
    out += std::to_string(minute);
  }
  out += hour24 < 12 ? " AM" : " PM";
  return out;
}

inline std::string format_flight_times(const Flight& f) {
  return format_date(f.depart) + " " + format_clock(f.depart, false) + " - " +
         format_clock(f.arrive, false);
}

inline std::string format_event_times(const CalendarEvent& e) {
  return format_date(e.start) + " " + format_clock(e.start, true) + " - " +
         format_clock(e.end, true);
}

inline std::string format_flight_row(const Flight& f) {
  return std::to_string(f.id) + " | " + f.carrier + " | " +
         std::to_string(f.price) + " | " + format_flight_times(f);
}

// ---------------------------------------------------------------------------
// JSON

inline json feature_value_to_json(const FeatureValue& v) {
  if (const bool* b = std::get_if<bool>(&v)) return *b;
  if (const double* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

inline FeatureValue feature_value_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw SchemaError("feature value must be a boolean, number or string");
}

inline json site_to_json(const Site& s) {
  json f = json::object();
  for (const auto& [name, v] : s.features) f[name] = feature_value_to_json(v);
  return {{"name", s.name}, {"category", s.category}, {"price", s.price},
          {"loc", s.loc}, {"features", f}};
}

inline Site site_from_json(const json& js) {
  Site site;
  site.name = js.at("name").get<std::string>();
  site.category = js.at("category").get<std::string>();
  site.price = js.at("price").get<int>();
  site.loc = js.at("loc").get<std::array<double, 2>>();
  for (const auto& [name, v] : js.at("features").items()) {
    site.features[name] = feature_value_from_json(v);
  }
  return site;
}

inline json to_json_value(const OptimizationWorld& w) {
  json j;
  j["k"] = w.params.k;
  j["p_observed"] = w.params.p_observed;
  j["table"] = w.table;
  j["masks"] = {w.masks[0], w.masks[1]};
  j["scales"] = w.scales;
  j["reviewers"] = w.reviewers;
  j["papers"] = w.papers;
  j["attempts"] = w.attempts;
  return j;
}

inline json to_json_value(const PlanningWorld& w) {
  json j;
  j["k"] = w.params.k;
  j["s"] = w.params.s;
  j["miles_per_unit"] = w.params.miles_per_unit;
  json sites = json::array();
  for (const auto& s : w.sites) sites.push_back(site_to_json(s));
  j["sites"] = sites;
  json prefs = json::array();
  for (const auto& p : w.preferences) {
    json e{{"type", to_string(p.type)}, {"weight", p.weight}, {"text", p.text}};
    switch (p.type) {
      case PreferenceType::feature:
        e["feature"] = p.feature;
        e["flag"] = p.flag;
        e["labels"] = p.labels;
        e["min_rating"] = p.min_rating;
        break;
      case PreferenceType::want_to_go: e["site"] = p.site; break;
      case PreferenceType::at_least_one: e["category"] = p.category; break;
      case PreferenceType::budget: e["budget"] = p.budget; break;
      case PreferenceType::distance: break;
    }
    prefs.push_back(e);
  }
  j["preferences"] = prefs;
  return j;
}

inline json to_json_value(const MediationWorld& w) {
  json j;
  j["p_event"] = w.params.p_event;
  j["f_shared"] = w.params.f_shared;
  j["F"] = w.params.F;
  j["theta_price"] = w.theta_price;
  j["theta_arrival"] = w.theta_arrival;
  json users = json::array();
  for (const auto& u : w.users) {
    json flights = json::array();
    for (const auto& f : u.flights) {
      flights.push_back({{"id", f.id}, {"carrier", f.carrier}, {"price", f.price},
                         {"depart", f.depart}, {"arrive", f.arrive}});
    }
    json events = json::array();
    for (const auto& e : u.events) {
      events.push_back({{"start", e.start}, {"end", e.end},
                        {"importance", e.importance}, {"shared", e.shared}});
    }
    users.push_back({{"flights", flights}, {"events", events},
                     {"price_mu", u.price_mu}, {"price_sigma", u.price_sigma}});
  }
  j["users"] = users;
  return j;
}

inline json params_json(const World& w) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, OptimizationWorld>) {
          return {{"k", x.params.k}, {"p_observed", x.params.p_observed}};
        } else if constexpr (std::is_same_v<T, PlanningWorld>) {
          return {{"k", x.params.k}, {"s", x.params.s},
                  {"miles_per_unit", x.params.miles_per_unit}};
        } else {
          return {{"p_event", x.params.p_event}, {"f_shared", x.params.f_shared},
                  {"F", x.params.F}};
        }
      },
      w);
}

// Self-describing world document: task, seed, params and hidden state.
inline json world_to_json(const World& w) {
  json j;
  j["task"] = to_string(task_of(w));
  j["seed"] = seed_of(w);
  j["params"] = params_json(w);
  j["state"] = std::visit([](const auto& x) { return to_json_value(x); }, w);
  return j;
}

inline World world_from_json(const json& doc) {
  try {
    const TaskId task = task_from_string(doc.at("task").get<std::string>());
    const auto seed = doc.at("seed").get<std::uint64_t>();
    const json& s = doc.at("state");
    switch (task) {
      case TaskId::optimization: {
        OptimizationWorld w;
        w.seed = seed;
        w.params.k = s.at("k").get<int>();
        w.params.p_observed = s.at("p_observed").get<double>();
        w.table = s.at("table").get<Matrix>();
        w.masks[0] = s.at("masks").at(0).get<Mask>();
        w.masks[1] = s.at("masks").at(1).get<Mask>();
        w.scales = s.at("scales").get<std::array<double, 2>>();
        w.reviewers = s.at("reviewers").get<std::vector<std::string>>();
        w.papers = s.at("papers").get<std::vector<std::string>>();
        w.attempts = s.value("attempts", 1);
        return w;
      }
      case TaskId::planning: {
        PlanningWorld w;
        w.seed = seed;
        w.params.k = s.at("k").get<int>();
        w.params.s = s.at("s").get<int>();
        w.params.miles_per_unit = s.at("miles_per_unit").get<double>();
        for (const auto& js : s.at("sites")) w.sites.push_back(site_from_json(js));
        for (const auto& jp : s.at("preferences")) {
          Preference p;
          p.type = preference_type_from_string(jp.at("type").get<std::string>());
          p.weight = jp.at("weight").get<double>();
          p.text = jp.at("text").get<std::string>();
          p.feature = jp.value("feature", "");
          p.flag = jp.value("flag", true);
          p.labels = jp.value("labels", std::vector<std::string>{});
          p.min_rating = jp.value("min_rating", 0.0);
          p.site = jp.value("site", -1);
          p.category = jp.value("category", "");
          p.budget = jp.value("budget", 0);
          w.preferences.push_back(std::move(p));
        }
        return w;
      }
      case TaskId::mediation: {
        MediationWorld w;
        w.seed = seed;
        w.params.p_event = s.at("p_event").get<double>();
        w.params.f_shared = s.at("f_shared").get<double>();
        w.params.F = s.at("F").get<int>();
        w.theta_price = s.at("theta_price").get<double>();
        w.theta_arrival = s.at("theta_arrival").get<double>();
        for (int u = 0; u < 2; ++u) {
          const json& ju = s.at("users").at(u);
          MediationUser& user = w.users[u];
          for (const auto& jf : ju.at("flights")) {
            user.flights.push_back({jf.at("id").get<int>(),
                                    jf.at("carrier").get<std::string>(),
                                    jf.at("price").get<int>(),
                                    jf.at("depart").get<int>(),
                                    jf.at("arrive").get<int>()});
          }
          for (const auto& je : ju.at("events")) {
            user.events.push_back({je.at("start").get<int>(), je.at("end").get<int>(),
                                   je.at("importance").get<int>(),
                                   je.at("shared").get<bool>()});
          }
          user.price_mu = ju.at("price_mu").get<double>();
          user.price_sigma = ju.at("price_sigma").get<double>();
        }
        return w;
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed world document: ") + e.what());
  }
  throw SchemaError("malformed world document");
}

}  // namespace decdial

#endif  // DECDIAL_WORLDS_HPP_

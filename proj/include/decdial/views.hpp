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

// Per-role partial observations. A view is built from the world by the
// role's visibility rule, and observation text is rendered from the view
// alone, so nothing hidden can reach an agent through the prompt.

#ifndef DECDIAL_VIEWS_HPP_
#define DECDIAL_VIEWS_HPP_

#include <cstdlib>
#include <string>
#include <vector>

#include "decdial/common.hpp"
#include "decdial/worldgen.hpp"
#include "decdial/worlds.hpp"

namespace decdial {

inline std::vector<std::string> role_names(TaskId task) {
  switch (task) {
    case TaskId::optimization: return {"agent-0", "agent-1"};
    case TaskId::planning: return {"user", "assistant"};
    case TaskId::mediation: return {"user-0", "user-1", "assistant"};
  }
  return {};
}

inline int actor_count(TaskId task) { return static_cast<int>(role_names(task).size()); }

inline ActorId role_from_name(TaskId task, std::string_view name) {
  const auto names = role_names(task);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<ActorId>(i);
  }
  throw DomainError("unknown role for " + std::string(to_string(task)) + ": " +
                    std::string(name));
}

struct AgentView {
  TaskId task = TaskId::optimization;
  ActorId role = 0;
  std::string role_name;
  json data;
};

inline json view_to_json(const AgentView& v) {
  return {{"task", to_string(v.task)}, {"role", v.role}, {"role_name", v.role_name},
          {"data", v.data}};
}

namespace detail {

inline json flight_json(const Flight& f) {
  return {{"id", f.id}, {"carrier", f.carrier}, {"price", f.price},
          {"depart", f.depart}, {"arrive", f.arrive}, {"times", format_flight_times(f)}};
}

inline json calendar_json(const std::vector<CalendarEvent>& events, bool with_importance) {
  json out = json::array();
  for (std::size_t i = 0; i < events.size(); ++i) {
    json e{{"id", i}, {"start", events[i].start}, {"end", events[i].end},
           {"times", format_event_times(events[i])}};
    if (with_importance) e["importance"] = events[i].importance;
    out.push_back(e);
  }
  return out;
}

inline json site_json(const Site& s) {
  json f = json::object();
  for (const auto& [name, v] : s.features) f[name] = feature_value_to_json(v);
  return {{"name", s.name}, {"etype", s.category}, {"est_price", s.price},
          {"loc", s.loc}, {"features", f}};
}

}  // namespace detail

inline AgentView make_view(const World& world, ActorId role) {
  const TaskId task = task_of(world);
  const auto names = role_names(task);
  if (role < 0 || role >= static_cast<int>(names.size())) {
    throw DomainError("unknown role " + std::to_string(role));
  }
  AgentView v{task, role, names[role], json::object()};
  if (const auto* w = std::get_if<OptimizationWorld>(&world)) {
    json cells = json::array();
    for (int i = 0; i < w->k(); ++i) {
      json row = json::array();
      for (int j = 0; j < w->k(); ++j) {
        row.push_back(w->masks[role][i][j]
                          ? json(displayed_value(w->table[i][j], w->scales[role]))
                          : json(nullptr));
      }
      cells.push_back(row);
    }
    v.data = {{"reviewers", w->reviewers}, {"papers", w->papers}, {"cells", cells},
              {"display", "scaled"}};
  } else if (const auto* w = std::get_if<PlanningWorld>(&world)) {
    v.data["k"] = w->k();
    if (role == 0) {
      json prefs = json::array();
      for (const auto& p : w->preferences) prefs.push_back(p.text);
      v.data["preferences"] = prefs;
    } else {
      json sites = json::array();
      for (const auto& s : w->sites) sites.push_back(detail::site_json(s));
      v.data["sites"] = sites;
    }
  } else {
    const auto& mw = std::get<MediationWorld>(world);
    if (role < 2) {
      const MediationUser& u = mw.users[role];
      json flights = json::array();
      for (const auto& f : u.flights) flights.push_back(detail::flight_json(f));
      v.data = {{"user", role},
                {"flights", flights},
                {"private_calendar", detail::calendar_json(u.calendar(false), true)},
                {"shared_calendar", detail::calendar_json(u.calendar(true), true)}};
    } else {
      json users = json::array();
      for (const auto& u : mw.users) {
        json flights = json::array();
        for (const auto& f : u.flights) flights.push_back(detail::flight_json(f));
        users.push_back({{"flights", flights},
                         {"calendar", detail::calendar_json(u.calendar(true), false)}});
      }
      v.data = {{"users", users}};
    }
  }
  return v;
}

// Python-literal rendering used for the planning database lines.
inline std::string python_number(double x) {
  if (x == std::floor(x) && std::fabs(x) < 1e15) return format_number(x);
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::string python_repr(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return "None";
    case json::value_t::boolean: return j.get<bool>() ? "True" : "False";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return std::to_string(j.get<long long>());
    case json::value_t::number_float: return python_number(j.get<double>());
    case json::value_t::string: {
      const auto s = j.get<std::string>();
      const bool double_quote =
          s.find('\'') != std::string::npos && s.find('"') == std::string::npos;
      const char q = double_quote ? '"' : '\'';
      return q + s + q;
    }
    case json::value_t::array: {
      std::vector<std::string> parts;
      for (const auto& x : j) parts.push_back(python_repr(x));
      return "[" + join(parts, ", ") + "]";
    }
    case json::value_t::object: {
      std::vector<std::string> parts;
      for (const auto& [k, x] : j.items()) parts.push_back(python_repr(k) + ": " + python_repr(x));
      return "{" + join(parts, ", ") + "}";
    }
    default: return "";
  }
}

namespace detail {

inline std::string optional_cell(const json& c) {
  return c.is_null() ? "" : std::to_string(c.get<long long>());
}

inline void append_flights(std::string& out, const json& flights) {
  out += "Flights:\nid | carrier | price | times\n";
  for (const auto& f : flights) {
    out += std::to_string(f.at("id").get<int>()) + " | " + f.at("carrier").get<std::string>() +
           " | " + std::to_string(f.at("price").get<int>()) + " | " +
           f.at("times").get<std::string>() + "\n";
  }
}

inline void append_calendar(std::string& out, const std::string& title, const json& events,
                            bool with_importance) {
  out += title + "\n";
  out += with_importance ? "id | importance | times\n" : "id | times\n";
  for (const auto& e : events) {
    out += std::to_string(e.at("id").get<int>()) + " | ";
    if (with_importance) out += "(" + std::to_string(e.at("importance").get<int>()) + ") | ";
    out += e.at("times").get<std::string>() + "\n";
  }
}

}  // namespace detail

// Bit-stable observation text for a view.
inline std::string render_observation(const AgentView& v) {
  std::string out;
  const json& d = v.data;
  switch (v.task) {
    case TaskId::optimization: {
      out = "Reviewer Paper Similarity Scores:\n";
      for (const auto& p : d.at("papers")) out += "," + p.get<std::string>();
      out += "\n";
      const auto& reviewers = d.at("reviewers");
      for (std::size_t i = 0; i < reviewers.size(); ++i) {
        out += reviewers[i].get<std::string>();
        for (const auto& c : d.at("cells").at(i)) out += "," + detail::optional_cell(c);
        out += "\n";
      }
      break;
    }
    case TaskId::planning: {
      if (d.contains("preferences")) {
        out = "Travel Preferences:\n";
        for (const auto& p : d.at("preferences")) out += p.get<std::string>() + "\n";
      } else {
        out = "Database:\n";
        for (const auto& s : d.at("sites")) out += python_repr(s) + "\n";
      }
      break;
    }
    case TaskId::mediation: {
      if (d.contains("users")) {
        for (std::size_t u = 0; u < d.at("users").size(); ++u) {
          const json& user = d.at("users").at(u);
          out += "User " + std::to_string(u) + " Information\n";
          detail::append_flights(out, user.at("flights"));
          detail::append_calendar(out, "Calendar:", user.at("calendar"), false);
        }
      } else {
        detail::append_flights(out, d.at("flights"));
        detail::append_calendar(out, "Private calendar:", d.at("private_calendar"), true);
        detail::append_calendar(out, "Shared calendar (visible to assistant):",
                                d.at("shared_calendar"), true);
      }
      break;
    }
  }
  return out;
}

inline std::string render_observation(const World& world, ActorId role) {
  return render_observation(make_view(world, role));
}

}  // namespace decdial

#endif  // DECDIAL_VIEWS_HPP_

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

// Proposal payloads as text: canonical rendering, per-viewer rendering,
// validation against a world, and parsing of agent-written proposals.
//
//   optimization  Proposal:
//                  - BLEU: Morgan Reed
//                  - Electra: Sofia Patel
//   planning      [Mad Seoul, NULL, NULL]
//   mediation     user 0: id 11, user 1: id 10

#ifndef DECDIAL_PROPOSALS_HPP_
#define DECDIAL_PROPOSALS_HPP_

#include <algorithm>
#include <regex>
#include <string>
#include <vector>

#include "decdial/decisions.hpp"
#include "decdial/reward.hpp"
#include "decdial/views.hpp"
#include "decdial/worlds.hpp"

namespace decdial {

inline constexpr const char* kNullSlot = "NULL";

// Throws SchemaError or DomainError naming the offending slot.
inline void check_proposal(const World& world, const ProposalPayload& payload) {
  if (const auto* w = std::get_if<OptimizationWorld>(&world)) {
    const auto* m = std::get_if<Matching>(&payload);
    if (!m) throw SchemaError("optimization proposals assign papers to reviewers");
    check_permutation(*m, w->k());
  } else if (const auto* w = std::get_if<PlanningWorld>(&world)) {
    const auto* it = std::get_if<Itinerary>(&payload);
    if (!it) throw SchemaError("planning proposals list itinerary slots");
    check_itinerary(*w, *it);
  } else {
    const auto& mw = std::get<MediationWorld>(world);
    const auto* fc = std::get_if<FlightChoice>(&payload);
    if (!fc) throw SchemaError("mediation proposals choose flights");
    if (fc->flights.size() != 2) throw SchemaError("a flight proposal has one entry per user");
    if (!fc->flights[0] && !fc->flights[1]) {
      throw SchemaError("a flight proposal needs a flight for at least one user");
    }
    for (int u = 0; u < 2; ++u) {
      if (fc->flights[u]) flight_of(mw, u, *fc->flights[u]);
    }
  }
}

// A full decision can end the game when accepted.
inline bool is_full(const ProposalPayload& payload) {
  if (std::holds_alternative<Matching>(payload)) return true;
  if (const auto* it = std::get_if<Itinerary>(&payload)) return itinerary_is_full(*it);
  const auto& fc = std::get<FlightChoice>(payload);
  return std::all_of(fc.flights.begin(), fc.flights.end(),
                     [](const std::optional<int>& f) { return f.has_value(); });
}

// Actors who must answer a proposal.
inline std::vector<ActorId> proposal_recipients(const World& world,
                                                const ProposalPayload& payload,
                                                ActorId proposer) {
  if (const auto* fc = std::get_if<FlightChoice>(&payload)) {
    std::vector<ActorId> out;
    for (int u = 0; u < 2; ++u) {
      if (fc->flights.at(u)) out.push_back(u);
    }
    return out;
  }
  std::vector<ActorId> out;
  for (ActorId a = 0; a < actor_count(task_of(world)); ++a) {
    if (a != proposer) out.push_back(a);
  }
  return out;
}

// Canonical proposal text, as the proposer sees it.
inline std::string proposal_text(const World& world, const ProposalPayload& payload) {
  if (const auto* w = std::get_if<OptimizationWorld>(&world)) {
    const auto& m = std::get<Matching>(payload);
    std::vector<std::pair<std::string, std::string>> lines;
    for (std::size_t r = 0; r < m.assignment.size(); ++r) {
      lines.emplace_back(paper_short_name(w->papers.at(m.assignment[r])), w->reviewers.at(r));
    }
    std::sort(lines.begin(), lines.end());
    std::string out = "Proposal:";
    for (const auto& [paper, reviewer] : lines) out += "\n - " + paper + ": " + reviewer;
    return out;
  }
  if (const auto* w = std::get_if<PlanningWorld>(&world)) {
    std::vector<std::string> names;
    for (const auto& s : std::get<Itinerary>(payload).slots) {
      names.push_back(s ? w->sites.at(*s).name : kNullSlot);
    }
    return "[" + join(names, ", ") + "]";
  }
  const auto& fc = std::get<FlightChoice>(payload);
  std::vector<std::string> parts;
  for (int u = 0; u < 2; ++u) {
    if (fc.flights.at(u)) {
      parts.push_back("user " + std::to_string(u) + ": id " + std::to_string(*fc.flights[u]));
    }
  }
  return join(parts, ", ");
}

// What `viewer` sees of a proposal. Mediation users see only their own
// flight row; the assistant sees the id list followed by each row.
inline std::string proposal_text_for(const World& world, const ProposalPayload& payload,
                                     ActorId viewer) {
  const auto* mw = std::get_if<MediationWorld>(&world);
  if (!mw) return proposal_text(world, payload);
  const auto& fc = std::get<FlightChoice>(payload);
  if (viewer < 2) {
    if (!fc.flights.at(viewer)) return "";
    return format_flight_row(flight_of(*mw, viewer, *fc.flights[viewer]));
  }
  std::string out = proposal_text(world, payload);
  for (int u = 0; u < 2; ++u) {
    if (fc.flights.at(u)) {
      out += "\nFlight for user " + std::to_string(u) + ": " +
             format_flight_row(flight_of(*mw, u, *fc.flights[u]));
    }
  }
  return out;
}

namespace detail {

inline int find_name(const std::vector<std::string>& names, const std::string& wanted) {
  const std::string w = to_lower(trim(wanted));
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (to_lower(names[i]) == w) return static_cast<int>(i);
  }
  return -1;
}

inline std::vector<std::string> json_strings(const json& j) {
  std::vector<std::string> out;
  for (const auto& x : j) out.push_back(x.get<std::string>());
  return out;
}

}  // namespace detail

// Parses an agent-written proposal, resolving names through the proposer's
// own view. Errors name the offending line or slot.
inline ProposalPayload parse_proposal_text(const AgentView& view, const std::string& text) {
  const std::string t = trim(text);
  switch (view.task) {
    case TaskId::optimization: {
      const auto reviewers = detail::json_strings(view.data.at("reviewers"));
      const auto papers = detail::json_strings(view.data.at("papers"));
      std::vector<std::string> shorts;
      for (const auto& p : papers) shorts.push_back(paper_short_name(p));
      const int k = static_cast<int>(reviewers.size());
      Matching m;
      m.assignment.assign(k, -1);
      std::vector<bool> paper_used(k, false);
      static const std::regex line(R"(^\s*-?\s*([^:]+?)\s*:\s*(.+?)\s*$)");
      for (const auto& raw : split(t, "\n")) {
        const std::string l = trim(raw);
        if (l.empty() || to_lower(l) == "proposal:") continue;
        std::smatch mm;
        if (!std::regex_match(l, mm, line)) throw SchemaError("cannot read proposal line: " + l);
        int p = detail::find_name(shorts, mm[1]);
        if (p < 0) p = detail::find_name(papers, mm[1]);
        if (p < 0) throw DomainError("unknown paper: " + std::string(mm[1]));
        const int r = detail::find_name(reviewers, mm[2]);
        if (r < 0) throw DomainError("unknown reviewer: " + std::string(mm[2]));
        if (paper_used[p]) throw SchemaError("paper " + shorts[p] + " is assigned twice");
        if (m.assignment[r] >= 0) {
          throw SchemaError("reviewer " + reviewers[r] + " is assigned twice");
        }
        paper_used[p] = true;
        m.assignment[r] = p;
      }
      for (int r = 0; r < k; ++r) {
        if (m.assignment[r] < 0) throw SchemaError("reviewer " + reviewers[r] + " has no paper");
      }
      return m;
    }
    case TaskId::planning: {
      if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
        throw SchemaError("an itinerary is written as [site, site, NULL]");
      }
      if (!view.data.contains("sites")) throw ActionError("You cannot send [propose].");
      std::vector<std::string> names;
      for (const auto& s : view.data.at("sites")) names.push_back(s.at("name").get<std::string>());
      Itinerary it;
      const auto parts = split(t.substr(1, t.size() - 2), ",");
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string name = trim(parts[i]);
        if (name == kNullSlot || name.empty()) {
          it.slots.emplace_back();
          continue;
        }
        const int idx = detail::find_name(names, name);
        if (idx < 0) {
          throw DomainError("slot " + std::to_string(i + 1) + " names an unknown site: " + name);
        }
        it.slots.emplace_back(idx);
      }
      const int k = view.data.at("k").get<int>();
      if (static_cast<int>(it.slots.size()) != k) {
        throw SchemaError("an itinerary has exactly " + std::to_string(k) + " slots");
      }
      return it;
    }
    case TaskId::mediation: {
      static const std::regex entry(R"(user\s*(\d{1,6})\s*:\s*(?:id\s*)?(\d{1,6}))",
                                    std::regex::icase);
      FlightChoice fc{{std::nullopt, std::nullopt}};
      bool any = false;
      const std::string first_line = split(t, "\n").front();
      for (std::sregex_iterator it(first_line.begin(), first_line.end(), entry), end; it != end;
           ++it) {
        const int user = std::stoi((*it)[1]);
        if (user < 0 || user > 1) throw DomainError("there is no user " + std::string((*it)[1]));
        if (fc.flights[user]) throw SchemaError("user " + std::to_string(user) + " is listed twice");
        fc.flights[user] = std::stoi((*it)[2]);
        any = true;
      }
      if (!any) throw SchemaError("a flight proposal is written as user 0: id 11, user 1: id 10");
      return fc;
    }
  }
  throw SchemaError("unknown task");
}

}  // namespace decdial

#endif  // DECDIAL_PROPOSALS_HPP_

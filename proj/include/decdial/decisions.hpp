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

#ifndef DECDIAL_DECISIONS_HPP_
#define DECDIAL_DECISIONS_HPP_

#include <optional>
#include <variant>
#include <vector>

#include "decdial/common.hpp"

namespace decdial {

// Optimization: paper assigned to each reviewer, indexed by reviewer.
struct Matching {
  std::vector<int> assignment;
  bool operator==(const Matching&) const = default;
};

// Planning: k ordered slots, each a site index or empty.
struct Itinerary {
  std::vector<std::optional<int>> slots;
  bool operator==(const Itinerary&) const = default;
};

// Mediation: flight id per user, empty when the proposal skips that user.
struct FlightChoice {
  std::vector<std::optional<int>> flights;
  bool operator==(const FlightChoice&) const = default;
};

using ProposalPayload = std::variant<Matching, Itinerary, FlightChoice>;

template <typename Payload>
struct DecisionValue {
  Payload decision;
  double value = 0.0;
};

inline json optional_ints_to_json(const std::vector<std::optional<int>>& v) {
  json j = json::array();
  for (const auto& x : v) j.push_back(x ? json(*x) : json(nullptr));
  return j;
}

inline std::vector<std::optional<int>> optional_ints_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("expected a list of ids or nulls");
  std::vector<std::optional<int>> out;
  for (const auto& x : j) {
    if (x.is_null()) {
      out.emplace_back();
    } else if (x.is_number_integer()) {
      out.emplace_back(x.get<int>());
    } else {
      throw SchemaError("expected an integer id or null");
    }
  }
  return out;
}

inline json payload_to_json(const ProposalPayload& p) {
  if (const auto* m = std::get_if<Matching>(&p)) {
    return {{"assignment", m->assignment}};
  }
  if (const auto* it = std::get_if<Itinerary>(&p)) {
    return {{"slots", optional_ints_to_json(it->slots)}};
  }
  return {{"flights", optional_ints_to_json(std::get<FlightChoice>(p).flights)}};
}

inline ProposalPayload payload_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("proposal must be an object");
  if (j.contains("assignment")) {
    const json& a = j.at("assignment");
    if (!a.is_array()) throw SchemaError("assignment must be a list");
    Matching m;
    for (const auto& x : a) {
      if (!x.is_number_integer()) throw SchemaError("assignment entries must be integers");
      m.assignment.push_back(x.get<int>());
    }
    return m;
  }
  if (j.contains("slots")) return Itinerary{optional_ints_from_json(j.at("slots"))};
  if (j.contains("flights")) return FlightChoice{optional_ints_from_json(j.at("flights"))};
  throw SchemaError("proposal needs one of assignment, slots or flights");
}

}  // namespace decdial

#endif  // DECDIAL_DECISIONS_HPP_

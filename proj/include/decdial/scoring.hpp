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

// Normalized scores and the text scorecards shown after a proposal.

#ifndef DECDIAL_SCORING_HPP_
#define DECDIAL_SCORING_HPP_

#include <algorithm>
#include <array>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "decdial/decisions.hpp"
#include "decdial/reward.hpp"
#include "decdial/solvers.hpp"
#include "decdial/worlds.hpp"

namespace decdial {

struct NormalizedScore {
  double raw = 0.0;
  double best = 0.0;
  double worst = 0.0;
  double normalized = 0.0;
};

// Denominators for one world. Optimization uses worst = 0 and divides by
// the pooled optimum; the other tasks use range normalization.
struct ScoreRange {
  double best = 0.0;
  double worst = 0.0;
};

namespace detail {

// Snaps values that exceed the unit interval only by accumulated rounding.
inline double snap_unit(double x) {
  constexpr double kSlack = 1e-12;
  if (x > 1.0 && x <= 1.0 + kSlack) return 1.0;
  if (x < 0.0 && x >= -kSlack) return 0.0;
  return x;
}

}  // namespace detail

inline ScoreRange score_range(const World& world) {
  if (const auto* w = std::get_if<OptimizationWorld>(&world)) {
    return {pooled_best_value(*w), 0.0};
  }
  if (const auto* w = std::get_if<PlanningWorld>(&world)) {
    const auto [best, worst] = best_worst_itinerary(*w);
    return {best.value, worst.value};
  }
  const auto [best, worst] = best_worst_flightpair(std::get<MediationWorld>(world));
  return {best.value, worst.value};
}

inline NormalizedScore normalize(TaskId task, double raw, const ScoreRange& range) {
  NormalizedScore s{raw, range.best, range.worst, 0.0};
  if (task == TaskId::optimization) {
    s.normalized = range.best > 0.0 ? raw / range.best : 1.0;
  } else {
    const double span = range.best - range.worst;
    s.normalized = span > 0.0 ? (raw - range.worst) / span : 1.0;
  }
  s.normalized = detail::snap_unit(s.normalized);
  return s;
}

// ---------------------------------------------------------------------------
// Per-task scoring

inline NormalizedScore score_matching(const OptimizationWorld& w, const Matching& m) {
  check_permutation(m, w.k());
  const Matrix pooled = impute_pooled(w).values;
  const double best = best_matching(pooled).value;
  return normalize(TaskId::optimization, matching_value(pooled, m), {best, 0.0});
}

struct ItineraryScore {
  double raw = 0.0;
  RewardBreakdown breakdown;
};

inline ItineraryScore score_itinerary(const PlanningWorld& w, const Itinerary& it) {
  RewardBreakdown b = planning_breakdown(w, it);
  return {b.total, std::move(b)};
}

struct FlightScore {
  double raw = 0.0;
  std::array<RewardBreakdown, 2> per_user;
};

inline FlightScore score_flights(const MediationWorld& w, const FlightChoice& choice) {
  if (choice.flights.size() != 2 || !choice.flights[0] || !choice.flights[1]) {
    throw IncompleteDecisionError("a final decision needs a flight for both users");
  }
  const int a = *choice.flights[0];
  const int b = *choice.flights[1];
  FlightScore s;
  s.raw = flights_reward(w, a, b);
  s.per_user[0] = flight_breakdown(w, 0, a, b);
  s.per_user[1] = flight_breakdown(w, 1, b, a);
  return s;
}

// Raw reward of a full decision, validated against the world.
inline double raw_reward(const World& world, const ProposalPayload& payload) {
  if (const auto* w = std::get_if<OptimizationWorld>(&world)) {
    const auto* m = std::get_if<Matching>(&payload);
    if (!m) throw SchemaError("optimization decisions are matchings");
    check_permutation(*m, w->k());
    return matching_value(impute_pooled(*w).values, *m);
  }
  if (const auto* w = std::get_if<PlanningWorld>(&world)) {
    const auto* it = std::get_if<Itinerary>(&payload);
    if (!it) throw SchemaError("planning decisions are itineraries");
    return itinerary_reward(*w, *it);
  }
  const auto* fc = std::get_if<FlightChoice>(&payload);
  if (!fc) throw SchemaError("mediation decisions are flight choices");
  return score_flights(std::get<MediationWorld>(world), *fc).raw;
}

inline NormalizedScore score_decision(const World& world, const ProposalPayload& payload,
                                      const ScoreRange& range) {
  return normalize(task_of(world), raw_reward(world, payload), range);
}

inline NormalizedScore score_decision(const World& world, const ProposalPayload& payload) {
  return score_decision(world, payload, score_range(world));
}

// ---------------------------------------------------------------------------
// Scorecard text

// The breakdown as displayed: every score rounded, total the sum of the
// rounded terms so the arithmetic line is self-consistent.
inline RewardBreakdown displayed(const RewardBreakdown& b) {
  RewardBreakdown d = b;
  for (auto& c : d.components) c.score = static_cast<double>(display_round(c.score));
  for (auto& c : d.checklist) c.score = static_cast<double>(display_round(c.score));
  d.total = d.component_sum();
  return d;
}

namespace detail {

inline std::string score_text(double score) { return std::to_string(display_round(score)); }

inline std::string render_planning(const RewardBreakdown& b) {
  std::string out = b.heading + "\n";
  std::string sum;
  long long total = 0;
  int n = 0;
  for (const auto& c : b.components) {
    out += std::to_string(++n) + ") ";
    if (c.placeholder) {
      out += c.label + "\n";
    } else {
      out += "(score: " + score_text(c.score) + ") " + c.label + "\n";
    }
    for (const auto& d : c.details) out += d + "\n";
    sum += signed_term(display_round(c.score));
    total += display_round(c.score);
  }
  out += "\nOverall Checklist:\n";
  for (const auto& c : b.checklist) {
    out += std::string(c.satisfied ? "YES" : "NO") + " (score: " + score_text(c.score) + ") " +
           c.label + "\n";
    sum += signed_term(display_round(c.score));
    total += display_round(c.score);
  }
  out += "TOTAL SCORE: " + sum + "=" + std::to_string(total) + "\n";
  return out;
}

inline std::string render_mediation(const RewardBreakdown& b) {
  std::string out = b.heading + "\n";
  std::vector<std::string> meetings;
  for (const auto& c : b.components) {
    meetings.insert(meetings.end(), c.details.begin(), c.details.end());
  }
  if (meetings.empty()) {
    out += "Conflicting meetings: None\n";
  } else {
    out += "Conflicting meetings:\n";
    for (const auto& m : meetings) out += "importance | times\n" + m + "\n";
  }
  out += "Score:\n";
  long long total = 0;
  for (const auto& c : b.components) {
    out += "- (" + score_text(c.score) + ") " + c.label + "\n";
    total += display_round(c.score);
  }
  out += "Total score: " + std::to_string(total) + "\n";
  return out;
}

}  // namespace detail

// Scorecard text. Optimization proposals carry no scorecard.
inline std::string render_feedback(const RewardBreakdown& b, TaskId task) {
  switch (task) {
    case TaskId::planning: return detail::render_planning(b);
    case TaskId::mediation: return detail::render_mediation(b);
    case TaskId::optimization: return "";
  }
  return "";
}

namespace detail {

inline long long parse_score(const std::string& s, const std::string& line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("bad score in scorecard line: " + line);
  }
}

inline RewardBreakdown parse_planning(const std::vector<std::string>& lines) {
  static const std::regex item(R"(^(\d+)\) (?:\(score: (-?\d+)\) )?(.*)$)");
  static const std::regex check(R"(^(YES|NO) \(score: (-?\d+)\) (.*)$)");
  RewardBreakdown b;
  b.heading = lines.at(0);
  std::size_t i = 1;
  for (; i < lines.size() && !lines[i].empty(); ++i) {
    std::smatch m;
    if (std::regex_match(lines[i], m, item)) {
      BreakdownLine c;
      c.label = m[3];
      if (m[2].matched) {
        c.score = static_cast<double>(parse_score(m[2], lines[i]));
      } else {
        c.placeholder = true;
      }
      b.components.push_back(std::move(c));
    } else if (!b.components.empty()) {
      b.components.back().details.push_back(lines[i]);
    } else {
      throw SchemaError("unexpected scorecard line: " + lines[i]);
    }
  }
  if (i + 1 >= lines.size() || lines[i + 1] != "Overall Checklist:") {
    throw SchemaError("scorecard is missing its checklist");
  }
  for (i += 2; i < lines.size(); ++i) {
    std::smatch m;
    if (std::regex_match(lines[i], m, check)) {
      b.checklist.push_back({m[1] == "YES", m[3], static_cast<double>(parse_score(m[2], lines[i]))});
    } else if (lines[i].rfind("TOTAL SCORE: ", 0) == 0) {
      const auto eq = lines[i].rfind('=');
      if (eq == std::string::npos) throw SchemaError("bad total line: " + lines[i]);
      b.total = static_cast<double>(parse_score(lines[i].substr(eq + 1), lines[i]));
      return b;
    } else {
      throw SchemaError("unexpected checklist line: " + lines[i]);
    }
  }
  throw SchemaError("scorecard is missing its total");
}

inline RewardBreakdown parse_mediation(const std::vector<std::string>& lines) {
  static const std::regex entry(R"(^- \((-?\d+)\) (.*)$)");
  RewardBreakdown b;
  b.heading = lines.at(0);
  std::size_t i = 1;
  std::vector<std::string> meetings;
  if (i < lines.size() && lines[i] == "Conflicting meetings: None") {
    ++i;
  } else if (i < lines.size() && lines[i] == "Conflicting meetings:") {
    for (++i; i + 1 < lines.size() && lines[i] == "importance | times"; i += 2) {
      meetings.push_back(lines[i + 1]);
    }
  } else {
    throw SchemaError("scorecard is missing its meetings section");
  }
  if (i >= lines.size() || lines[i] != "Score:") throw SchemaError("scorecard is missing Score:");
  for (++i; i < lines.size(); ++i) {
    std::smatch m;
    if (std::regex_match(lines[i], m, entry)) {
      b.components.push_back({m[2], static_cast<double>(parse_score(m[1], lines[i])), {}, false});
    } else if (lines[i].rfind("Total score: ", 0) == 0) {
      b.total = static_cast<double>(parse_score(lines[i].substr(13), lines[i]));
      if (!meetings.empty()) {
        if (b.components.empty()) throw SchemaError("meetings listed without a score line");
        b.components.front().details = std::move(meetings);
      }
      return b;
    } else {
      throw SchemaError("unexpected scorecard line: " + lines[i]);
    }
  }
  throw SchemaError("scorecard is missing its total");
}

}  // namespace detail

// Inverse of render_feedback: parse(render(b)) == displayed(b).
inline RewardBreakdown parse_feedback(const std::string& text, TaskId task) {
  std::vector<std::string> lines = split(text, "\n");
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw SchemaError("empty scorecard");
  switch (task) {
    case TaskId::planning: return detail::parse_planning(lines);
    case TaskId::mediation: return detail::parse_mediation(lines);
    case TaskId::optimization: break;
  }
  throw SchemaError("optimization proposals have no scorecard");
}

}  // namespace decdial

#endif  // DECDIAL_SCORING_HPP_

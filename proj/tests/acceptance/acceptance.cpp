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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

namespace decdial {
namespace {

// Generation fidelity
constexpr int kGenerationSeeds = 200;
constexpr double kMaskDensity = 0.4;
constexpr double kMaskDensityTol = 0.03;
constexpr double kWorkFraction = 0.75;
constexpr double kWorkFractionTol = 0.05;
constexpr double kGenerationSeconds = 60.0;
// Solver equivalence
constexpr int kSolverTables = 50;
constexpr double kSolverTol = 1e-9;
constexpr double kSolverSeconds = 120.0;
// Score anchoring
constexpr int kOracleSeeds = 20;
constexpr int kRandomMediationEpisodes = 1000;
constexpr double kRandomMeanTol = 0.01;
// Protocol
constexpr int kReplayEpisodes = 100;
// Scorecards
constexpr double kComponentTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

AgentFactory chatty(int messages) {
  return [messages](ActorId role, std::uint64_t seed) -> std::unique_ptr<Agent> {
    return std::make_unique<testing::ChattyAgent>(messages, derive_seed(seed, role + 1));
  };
}

// ---------------------------------------------------------------------------

// Independent check of the pooling criterion: enumerate all permutations of
// the pooled table and of each player's own view, taking the first optimum
// in lexicographic order as that player's solo plan.
bool pooling_criterion_holds(const OptimizationWorld& w) {
  const int k = w.k();
  Matrix pooled(k, std::vector<double>(k, 50.0));
  std::array<Matrix, 2> solo{pooled, pooled};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (w.masks[0][i][j] || w.masks[1][i][j]) pooled[i][j] = w.table[i][j];
      for (int p = 0; p < 2; ++p) {
        if (w.masks[p][i][j]) solo[p][i][j] = w.table[i][j];
      }
    }
  }
  const double best = testing::enumerate_permutations(pooled).best;
  for (int p = 0; p < 2; ++p) {
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> arg = perm;
    double top = -1.0;
    do {
      double v = 0.0;
      for (int i = 0; i < k; ++i) v += solo[p][i][perm[i]];
      if (v > top) {
        top = v;
        arg = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    double achieved = 0.0;
    for (int i = 0; i < k; ++i) achieved += pooled[i][arg[i]];
    if (best < kRequiredRatio * achieved) return false;
  }
  return true;
}

Outcome generation_fidelity() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<double> cells;
  long long observed = 0;
  long long mask_cells = 0;
  int accepted = 0;
  int exhausted = 0;
  int criterion_violations = 0;
  for (std::uint64_t seed = 0; seed < kGenerationSeeds; ++seed) {
    World world;
    try {
      world = generate(TaskId::optimization, seed);
    } catch (const GenerationError&) {
      ++exhausted;
      continue;
    }
    const auto& w = std::get<OptimizationWorld>(world);
    ++accepted;
    for (int i = 0; i < w.k(); ++i) {
      for (int j = 0; j < w.k(); ++j) {
        cells.push_back(w.table[i][j]);
        for (int p = 0; p < 2; ++p) {
          observed += w.masks[p][i][j];
          ++mask_cells;
        }
      }
    }
    if (!pooling_criterion_holds(w)) ++criterion_violations;
  }
  const double ks = testing::ks_uniform(cells, 0.0, 100.0) * std::sqrt(double(cells.size()));
  const double density = double(observed) / double(mask_cells);
  o.require(ks <= testing::kKsCritical01,
            "optimization cells KS sqrt(n)*D=" + fmt(ks, 3) + " > " + fmt(testing::kKsCritical01, 3) +
                " over " + std::to_string(accepted) + " accepted worlds");
  o.require(std::abs(density - kMaskDensity) <= kMaskDensityTol,
            "mask density " + fmt(density) + " outside 0.4+-0.03");
  o.require(criterion_violations == 0,
            std::to_string(criterion_violations) + " accepted worlds miss the 1.25 pooling ratio");

  int planning_failures = 0;
  for (std::uint64_t seed = 0; seed < kGenerationSeeds; ++seed) {
    try {
      generate(TaskId::planning, seed);
    } catch (const GenerationError&) {
      ++planning_failures;
    }
  }
  o.require(planning_failures == 0, std::to_string(planning_failures) + " planning seeds failed");

  long long events = 0;
  long long shared = 0;
  int bad_importance = 0;
  int bad_duration = 0;
  for (std::uint64_t seed = 0; seed < kGenerationSeeds; ++seed) {
    const auto w = std::get<MediationWorld>(generate(TaskId::mediation, seed));
    for (const auto& u : w.users) {
      for (const auto& e : u.events) {
        ++events;
        shared += e.shared;
        if (e.importance < 1 || e.importance > 10) ++bad_importance;
      }
      for (const auto& f : u.flights) {
        const int minutes = f.arrive - f.depart;
        if (minutes < 60 || minutes > 600) ++bad_duration;
      }
    }
  }
  const double work = double(shared) / double(events);
  o.require(bad_importance == 0, std::to_string(bad_importance) + " importances outside [1,10]");
  o.require(bad_duration == 0, std::to_string(bad_duration) + " flight durations outside [1,10] h");
  o.require(std::abs(work - kWorkFraction) <= kWorkFractionTol,
            "work-event fraction " + fmt(work) + " outside 0.75+-0.05");

  const double secs = seconds_since(t0);
  o.require(secs < kGenerationSeconds, "runtime " + fmt(secs, 1) + " s");
  o.note("KS " + fmt(ks, 3) + ", mask density " + fmt(density) + ", " + std::to_string(accepted) +
         " accepted (" + std::to_string(exhausted) + " seeds exhausted the draw budget), work " +
         fmt(work) + ", " + fmt(secs, 1) + " s");
  return o;
}

// ---------------------------------------------------------------------------

Outcome solver_equivalence() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20260501);
  int matching_mismatches = 0;
  for (int t = 0; t < kSolverTables; ++t) {
    Matrix table(8, std::vector<double>(8));
    for (auto& row : table) {
      for (double& c : row) c = rng.uniform(0.0, 100.0);
    }
    if (best_matching(table).value != testing::enumerate_permutations(table).best) {
      ++matching_mismatches;
    }
  }
  o.require(matching_mismatches == 0,
            std::to_string(matching_mismatches) + " matchings differ from 8! enumeration");

  int itinerary_mismatches = 0;
  int itinerary_cases = 0;
  for (int k = 1; k <= 2; ++k) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const auto w = std::get<PlanningWorld>(generate(TaskId::planning, seed, {{"k", k}}));
      const auto [best, worst] = best_worst_itinerary(w);
      const auto brute = testing::brute_itinerary_extremes(w);
      ++itinerary_cases;
      if (std::abs(best.value - brute.best) > kSolverTol ||
          std::abs(worst.value - brute.worst) > kSolverTol) {
        ++itinerary_mismatches;
      }
    }
  }
  o.require(itinerary_mismatches == 0,
            std::to_string(itinerary_mismatches) + " itinerary extremes differ from nested loops");

  int flight_mismatches = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto w = std::get<MediationWorld>(generate(TaskId::mediation, seed));
    const auto [best, worst] = best_worst_flightpair(w);
    const auto brute = testing::all_flight_pairs(w);
    if (std::abs(best.value - brute.best) > kSolverTol ||
        std::abs(worst.value - brute.worst) > kSolverTol) {
      ++flight_mismatches;
    }
  }
  o.require(flight_mismatches == 0,
            std::to_string(flight_mismatches) + " flight-pair extremes differ from all pairs");
  const double secs = seconds_since(t0);
  o.require(secs < kSolverSeconds, "runtime " + fmt(secs, 1) + " s");
  o.note(std::to_string(kSolverTables) + " tables, " + std::to_string(itinerary_cases) +
         " itinerary worlds, 50 flight worlds, " + fmt(secs, 1) + " s");
  return o;
}

// ---------------------------------------------------------------------------

Outcome score_anchoring() {
  Outcome o;
  for (TaskId task : {TaskId::optimization, TaskId::planning, TaskId::mediation}) {
    RunConfig config;
    config.task = task;
    for (std::uint64_t s = 0; s < kOracleSeeds; ++s) config.seeds.push_back(s);
    config.endpoints = {"oracle"};
    const auto summary = summarize(run_selfplay(config));
    o.require(summary.terminated == kOracleSeeds,
              std::string(to_string(task)) + " oracle terminated " +
                  std::to_string(summary.terminated) + "/" + std::to_string(kOracleSeeds));
    o.require(summary.score.mean == 1.0,
              std::string(to_string(task)) + " oracle mean " + fmt(summary.score.mean, 9));
  }

  RunConfig random;
  random.task = TaskId::mediation;
  for (int s = 0; s < kRandomMediationEpisodes; ++s) random.seeds.push_back(s);
  const auto rows = run_selfplay(random);
  const auto summary = summarize(rows);
  double exact = 0.0;
  int out_of_range = 0;
  for (int s = 0; s < kRandomMediationEpisodes; ++s) {
    const auto w = std::get<MediationWorld>(generate(TaskId::mediation, s));
    const auto pairs = testing::all_flight_pairs(w);
    double mean = 0.0;
    for (double v : pairs.values) {
      const double n = (v - pairs.worst) / (pairs.best - pairs.worst);
      if (n < -1e-12 || n > 1.0 + 1e-12) ++out_of_range;
      mean += n;
    }
    exact += mean / double(pairs.values.size());
  }
  exact /= kRandomMediationEpisodes;
  o.require(summary.terminated == kRandomMediationEpisodes,
            "random mediation terminated " + std::to_string(summary.terminated));
  o.require(std::abs(summary.score.mean - exact) <= kRandomMeanTol,
            "random mediation mean " + fmt(summary.score.mean) + " vs exact " + fmt(exact));

  Rng rng(7);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    World opt;
    try {
      opt = generate(TaskId::optimization, seed + 1000);
    } catch (const GenerationError&) {
      continue;
    }
    const World plan = generate(TaskId::planning, seed);
    for (int i = 0; i < 20; ++i) {
      Matching m;
      m.assignment = {0, 1, 2, 3, 4, 5, 6, 7};
      rng.shuffle(m.assignment);
      const double a = score_decision(opt, m).normalized;
      std::vector<int> ids(39);
      std::iota(ids.begin(), ids.end(), 0);
      rng.shuffle(ids);
      const double b = score_decision(plan, to_itinerary({ids[0], ids[1], ids[2]})).normalized;
      for (double x : {a, b}) out_of_range += (x < 0.0 || x > 1.0);
    }
  }
  for (const auto& r : rows) {
    if (r.normalized) out_of_range += (*r.normalized < 0.0 || *r.normalized > 1.0);
  }
  o.require(out_of_range == 0, std::to_string(out_of_range) + " normalized scores outside [0,1]");
  o.note("oracle 1.0 on 3x" + std::to_string(kOracleSeeds) + " seeds; random mediation " +
         fmt(summary.score.mean) + " vs exact " + fmt(exact));
  return o;
}

// ---------------------------------------------------------------------------

// Proposes partial decisions as often as full ones and otherwise behaves
// like the random agent; responders accept or reject at random.
class FuzzAgent : public Agent {
 public:
  explicit FuzzAgent(std::uint64_t seed) : rng_(seed), inner_(seed) {}
  std::string name() const override { return "fuzz"; }
  AgentReply act(const ActionRequest& r) override {
    if (is_legal(r, ActionKind::accept)) {
      return reply_action(rng_.bernoulli(0.5) ? ActionKind::accept : ActionKind::reject, r.role);
    }
    if (is_legal(r, ActionKind::propose) && rng_.bernoulli(0.6)) {
      AgentReply full = inner_.act(r);
      if (full.action && full.action->proposal && rng_.bernoulli(0.5)) {
        if (auto* it = std::get_if<Itinerary>(&*full.action->proposal)) {
          it->slots[rng_.index(it->slots.size())].reset();
        } else if (auto* fc = std::get_if<FlightChoice>(&*full.action->proposal)) {
          fc->flights[rng_.index(2)].reset();
        }
      }
      return full;
    }
    std::optional<ActorId> to;
    if (r.task == TaskId::mediation) to = r.role == 2 ? ActorId(rng_.index(2)) : ActorId(2);
    return reply_action(ActionKind::message, r.role, "let us keep talking", std::nullopt, to);
  }

 private:
  Rng rng_;
  RandomAgent inner_;
};

Outcome protocol_state_machine() {
  Outcome o;
  int rejects = 0;
  int proposals = 0;
  int terminations = 0;
  int partial_accepts = 0;
  int violations_reject = 0;
  int violations_legal = 0;
  int violations_termination = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const TaskId task = static_cast<TaskId>(seed % 3);
    World world;
    try {
      world = generate(task, seed);
    } catch (const GenerationError&) {
      continue;
    }
    std::vector<std::unique_ptr<Agent>> agents;
    for (int a = 0; a < actor_count(task); ++a) {
      agents.push_back(std::make_unique<FuzzAgent>(derive_seed(seed, a)));
    }
    SessionState s = new_session(std::move(world));
    bool was_terminal = false;
    while (!s.over()) {
      const SessionState before = s;
      s = request_action(*agents[s.turn], s, s.turn).state;
      const auto& a = s.transcript.back().action;
      if (a.kind == ActionKind::propose) {
        ++proposals;
        // A proposal that reaches the action cap ends the session.
        for (ActorId r : s.over() ? std::vector<ActorId>{} : s.pending->recipients) {
          if (legal_actions(s, r) != std::set<ActionKind>{ActionKind::accept, ActionKind::reject}) {
            ++violations_legal;
          }
        }
      }
      if (a.kind == ActionKind::reject) {
        ++rejects;
        if (s.pending) ++violations_reject;
      }
      if (a.kind == ActionKind::accept && before.pending && !is_full(before.pending->payload)) {
        ++partial_accepts;
        if (s.terminal()) ++violations_termination;
      }
      if (s.terminal() && !was_terminal) {
        ++terminations;
        const bool ok = a.kind == ActionKind::accept && before.pending &&
                        is_full(before.pending->payload) && s.final_decision &&
                        *s.final_decision == before.pending->payload;
        if (!ok) ++violations_termination;
      }
      if (was_terminal) ++violations_termination;
      was_terminal = s.terminal();
    }
    try {
      submit_action(s, {ActionKind::message, 0, std::nullopt, "late", std::nullopt});
      ++violations_termination;
    } catch (const ActionError&) {
    }
  }
  o.require(violations_reject == 0 && rejects > 0,
            "reject left a pending proposal " + std::to_string(violations_reject) + " times");
  o.require(violations_legal == 0 && proposals > 0,
            "post-proposal legal set wrong " + std::to_string(violations_legal) + " times");
  o.require(violations_termination == 0 && partial_accepts > 0,
            "termination rule broken " + std::to_string(violations_termination) + " times");

  int replayed = 0;
  int replay_mismatches = 0;
  for (std::uint64_t seed = 0; replayed < kReplayEpisodes; ++seed) {
    const TaskId task = static_cast<TaskId>(seed % 3);
    const auto r = run_episode(task, seed, default_params(task), chatty(seed % 5));
    if (r.log.empty()) continue;
    ++replayed;
    try {
      const EpisodeLog log = parse_log(r.log);
      const SessionState back = replay(log);
      std::vector<std::string> names;
      for (const auto& seat : log.header.at("roster")) names.push_back(seat.at("agent"));
      if (serialize_log(make_log(back, names)) != r.log) ++replay_mismatches;
    } catch (const Error&) {
      ++replay_mismatches;
    }
  }
  o.require(replay_mismatches == 0,
            std::to_string(replay_mismatches) + "/" + std::to_string(replayed) +
                " logs did not replay byte-exactly");
  o.note(std::to_string(proposals) + " proposals, " + std::to_string(rejects) + " rejects, " +
         std::to_string(partial_accepts) + " partial accepts, " + std::to_string(terminations) +
         " terminations, " + std::to_string(replayed) + " logs replayed byte-exactly");
  return o;
}

// ---------------------------------------------------------------------------

// The reference text prints "vegan.Try"; sentences are joined with one space here.
std::string normalize_spaces(const std::string& s) {
  static const std::regex joined(R"(\.([A-Z]))");
  return std::regex_replace(s, joined, ". $1");
}

Outcome query_engine() {
  Outcome o;
  const QueryDatabase db = testing::reference_database();
  struct Pair {
    std::string query;
    std::string result;
  };
  const std::vector<Pair> pairs{
      {"Search(fields=[name], filters=[category == landmark])",
       "Search Results (4):\nname\nHindenberg Memorial\nThe Tower\nLiberty Memorial\n"
       "Einstein's summer house\n"},
      {"Search(fields=[name], filters=[category == concert])", "Search Results: No results\n"},
      {"Search(fields=[name], text_query=live music)",
       "Search Results (6):\nname\nBards n Brews\nKozy Kar\nSaul's\nA-Trane\nThe Jazz Spot\n"
       "The Dockside Grill\n"},
      {"Search(fields=[name, price], text_query=live music, filters=[price <= 40])",
       "Search Results (3):\nname|price\nBards n Brews|20\nKozy Kar|30\nThe Jazz Spot|40\n"},
      {"Search(fields=[name], filters=[vegan == true])",
       "You cannot filter by vegan.Try searching with a text query instead.\n"},
  };
  int matched = 0;
  for (const auto& p : pairs) {
    const std::string got = run_search(p.query, db);
    const bool ok = got == normalize_spaces(p.result);
    o.require(ok, "mismatch for " + p.query + ": got \"" + got + "\"");
    matched += ok;
  }
  o.note(std::to_string(matched) + "/" + std::to_string(pairs.size()) +
         " reference query/result pairs reproduced");
  return o;
}

// ---------------------------------------------------------------------------

Outcome psp_mechanics() {
  Outcome o;
  int sources = 0;
  int proposal_only_bad = 0;
  int prefix_bad = 0;
  int notice_bad = 0;
  int notices_seen = 0;
  for (std::uint64_t seed = 0; sources < 30; ++seed) {
    const TaskId task = static_cast<TaskId>(seed % 3);
    const auto src = run_episode(task, seed, default_params(task), chatty(4 + seed % 6));
    if (src.log.empty() || src.status != SessionStatus::terminated) continue;
    ++sources;
    const EpisodeLog source = parse_log(src.log);
    const int target = total_words(source);

    const auto single = run_psp(source, RunMode::psp_proposal, endpoint_factory({"random"}));
    if (single.generated != 1) ++proposal_only_bad;

    for (RunMode mode : {RunMode::psp50, RunMode::psp75}) {
      const auto r = run_psp(source, mode, chatty(40));
      const std::string text = r.log;
      const EpisodeLog log = parse_log(text);
      const std::size_t p = prefix_length(source, mode);
      // Byte-identical prefix: the first p event lines of both logs agree.
      const auto src_lines = split(src.log, "\n");
      const auto new_lines = split(text, "\n");
      std::vector<std::string> src_events;
      std::vector<std::string> new_events;
      for (const auto& l : src_lines) {
        if (l.find(R"("type":"event")") != std::string::npos) src_events.push_back(l);
      }
      for (const auto& l : new_lines) {
        if (l.find(R"("type":"event")") != std::string::npos) new_events.push_back(l);
      }
      if (new_events.size() < p) {
        ++prefix_bad;
      } else {
        for (std::size_t i = 0; i < p; ++i) prefix_bad += src_events[i] != new_events[i];
      }
      try {
        replay(log);
      } catch (const Error&) {
        ++prefix_bad;
      }

      // The first notice goes to the first proposer turn at or after the
      // point where live words come within the window of the source total.
      std::size_t due = log.events.size();
      int words = 0;
      for (std::size_t i = 0; i <= log.events.size(); ++i) {
        if (i >= p && words >= target - kForcingWindow) {
          due = i;
          break;
        }
        if (i == log.events.size()) break;
        const std::string kind = log.events[i].at("kind");
        if (kind == "message" || kind == "propose") {
          words += word_count(log.events[i].at("text").get<std::string>());
        }
      }
      std::optional<std::size_t> expected;
      for (std::size_t i = due; i < log.events.size(); ++i) {
        const auto& e = log.events[i];
        const std::string kind = e.at("kind");
        if (e.value("auto", false) || kind == "accept" || kind == "reject") continue;
        if (may_propose(log.task(), e.at("sender").get<ActorId>())) {
          expected = i;
          break;
        }
      }
      notices_seen += !log.notices.empty();
      for (const auto& n : log.notices) notice_bad += n.text != kForcingNotice;
      if (expected) {
        if (log.notices.empty() || log.notices.front().before != static_cast<int>(*expected)) {
          ++notice_bad;
        }
      } else if (!log.notices.empty() && static_cast<std::size_t>(log.notices.front().before) < due) {
        ++notice_bad;
      }
    }
  }
  o.require(proposal_only_bad == 0,
            std::to_string(proposal_only_bad) + " proposal-only runs generated other than 1 action");
  o.require(prefix_bad == 0, std::to_string(prefix_bad) + " prefix lines differ or logs fail replay");
  o.require(notice_bad == 0 && notices_seen > 0,
            std::to_string(notice_bad) + " forcing notices misplaced (" +
                std::to_string(notices_seen) + " runs with notices)");
  o.note(std::to_string(sources) + " source logs; " + std::to_string(notices_seen) +
         " continuations reached the forcing window");
  return o;
}

// ---------------------------------------------------------------------------

const char* kReferenceScorecards[] = {
    "Proposal Score:\n"
    "1) (score: 4) Common Grounds\n"
    "good for groups: True\n"
    "open late: False\n"
    "rating: 2.5\n"
    "touristy: False\n"
    "vegan options: True\n"
    "2) Empty\n"
    "3) Empty\n"
    "4) Empty\n"
    "5) Empty\n"
    "\n"
    "Overall Checklist:\n"
    "YES (score: 0) keep budget below $30\n"
    "NO (score: -9) definitely want to go to Mad Seoul\n"
    "TOTAL SCORE: +4+0+0+0+0+0-9=-5\n",
    "Proposal Score:\n"
    "1) (score: 1) Mad Seoul\n"
    "good for kids: False\n"
    "live music: False\n"
    "open late: True\n"
    "touristy: True\n"
    "vegan options: True\n"
    "2) (score: -8) Travel from Mad Seoul to Lincoln Park, 0.8mi\n"
    "3) (score: -3) Lincoln Park\n"
    "good for groups: False\n"
    "good for kids: True\n"
    "rating: 3\n"
    "touristy: False\n"
    "viewpoint: False\n"
    "4) (score: -11) Travel from Lincoln Park to Atlas Park, 1.1mi\n"
    "5) (score: 7) Atlas Park\n"
    "good for groups: False\n"
    "good for kids: True\n"
    "has parking: False\n"
    "touristy: True\n"
    "viewpoint: True\n"
    "\n"
    "Overall Checklist:\n"
    "NO (score: -1) keep budget below $30\n"
    "YES (score: 9) definitely want to go to Mad Seoul\n"
    "TOTAL SCORE: +1-8-3-11+7-1+9=-6\n",
};

// Line grammar of a planning scorecard.
bool well_formed(const std::string& card, int k) {
  static const std::regex item(R"(^(\d+)\) (\(score: -?\d+\) .+|Empty)$)");
  static const std::regex detail(R"(^[a-z][a-z ]*: .+$)");
  static const std::regex check(R"(^(YES|NO) \(score: -?\d+\) .+$)");
  static const std::regex total(R"(^TOTAL SCORE: ([+-]\d+)+=-?\d+$)");
  const auto lines = split(card, "\n");
  std::size_t i = 0;
  if (lines.empty() || lines[i++] != "Proposal Score:") return false;
  int items = 0;
  for (; i < lines.size() && !lines[i].empty(); ++i) {
    std::smatch m;
    if (std::regex_match(lines[i], m, item)) {
      if (std::stoi(m[1]) != ++items) return false;
    } else if (!std::regex_match(lines[i], detail)) {
      return false;
    }
  }
  if (items != 2 * k - 1) return false;
  if (++i >= lines.size() || lines[i++] != "Overall Checklist:") return false;
  for (; i < lines.size() && std::regex_match(lines[i], check); ++i) {
  }
  if (i >= lines.size() || !std::regex_match(lines[i], total)) return false;
  return i + 2 == lines.size() && lines.back().empty();
}

// Displayed terms, in order, and their stated total.
bool arithmetic_consistent(const std::string& card) {
  static const std::regex score(R"(\(score: (-?\d+)\))");
  static const std::regex empty_item(R"(^\d+\) Empty$)");
  std::vector<long long> shown;
  std::string total_line;
  for (const auto& l : split(card, "\n")) {
    std::smatch m;
    if (std::regex_search(l, m, score)) shown.push_back(std::stoll(m[1]));
    if (std::regex_match(l, empty_item)) shown.push_back(0);
    if (l.rfind("TOTAL SCORE: ", 0) == 0) total_line = l.substr(13);
  }
  const auto eq = total_line.rfind('=');
  if (eq == std::string::npos) return false;
  std::string expected;
  long long sum = 0;
  for (long long v : shown) {
    expected += signed_term(v);
    sum += v;
  }
  return total_line.substr(0, eq) == expected && std::stoll(total_line.substr(eq + 1)) == sum;
}

Outcome scorecard_rendering() {
  Outcome o;
  int reference_ok = 0;
  for (const char* card : kReferenceScorecards) {
    bool ok = well_formed(card, 3) && arithmetic_consistent(card);
    try {
      ok = ok && render_feedback(parse_feedback(card, TaskId::planning), TaskId::planning) == card;
    } catch (const Error&) {
      ok = false;
    }
    reference_ok += ok;
  }
  o.require(reference_ok == 2, "reference scorecards do not round-trip through the renderer");

  Rng rng(3);
  int cards = 0;
  int malformed = 0;
  int arithmetic = 0;
  int sums = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto w = std::get<PlanningWorld>(generate(TaskId::planning, seed));
    std::vector<int> ids(w.sites.size());
    std::iota(ids.begin(), ids.end(), 0);
    rng.shuffle(ids);
    Itinerary it = to_itinerary({ids[0], ids[1], ids[2]});
    const bool partial = seed % 3 == 0;
    if (partial) it.slots[rng.index(3)].reset();
    const auto b = planning_breakdown(w, it);
    const std::string card = render_feedback(b, TaskId::planning);
    ++cards;
    malformed += !well_formed(card, w.k());
    arithmetic += !arithmetic_consistent(card);
    double components = 0.0;
    for (const auto& c : b.components) components += c.score;
    for (const auto& c : b.checklist) components += c.score;
    bool sum_ok = std::abs(components - b.total) <= kComponentTol;
    if (!partial) {
      sum_ok = sum_ok &&
               std::abs(testing::brute_itinerary_value(w, {ids[0], ids[1], ids[2]}) - b.total) <=
                   kComponentTol;
    }
    sums += !sum_ok;
  }
  o.require(malformed == 0, std::to_string(malformed) + " scorecards malformed");
  o.require(arithmetic == 0, std::to_string(arithmetic) + " arithmetic lines inconsistent");
  o.require(sums == 0, std::to_string(sums) + " component sums differ from totals");
  o.note("2 reference scorecards round-trip; " + std::to_string(cards) +
         " generated scorecards well-formed");
  return o;
}

}  // namespace
}  // namespace decdial

int main() {
  using decdial::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"generation-fidelity", decdial::generation_fidelity},
      {"solver-oracle-equivalence", decdial::solver_equivalence},
      {"score-anchoring", decdial::score_anchoring},
      {"protocol-state-machine", decdial::protocol_state_machine},
      {"query-engine", decdial::query_engine},
      {"psp-mechanics", decdial::psp_mechanics},
      {"scorecard-rendering", decdial::scorecard_rendering},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

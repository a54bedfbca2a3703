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

// Batch drivers: self-play, prompted self-play from a logged prefix, and
// summary statistics.

#ifndef DECDIAL_HARNESS_HPP_
#define DECDIAL_HARNESS_HPP_

#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "decdial/agents.hpp"
#include "decdial/bridge.hpp"
#include "decdial/dialogue.hpp"
#include "decdial/episode_log.hpp"
#include "decdial/worldgen.hpp"

namespace decdial {

inline constexpr int kForcingWindow = 25;

enum class RunMode { selfplay, psp50, psp75, psp_proposal };

inline std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::selfplay: return "selfplay";
    case RunMode::psp50: return "psp-50";
    case RunMode::psp75: return "psp-75";
    case RunMode::psp_proposal: return "psp-proposal";
  }
  return "unknown";
}

inline RunMode run_mode_from_string(std::string_view s) {
  if (s == "selfplay") return RunMode::selfplay;
  if (s == "psp-50") return RunMode::psp50;
  if (s == "psp-75") return RunMode::psp75;
  if (s == "psp-proposal") return RunMode::psp_proposal;
  throw DomainError("unknown run mode: " + std::string(s));
}

// Builds the agent for one role of one episode.
using AgentFactory =
    std::function<std::unique_ptr<Agent>(ActorId role, std::uint64_t seed)>;

inline AgentFactory endpoint_factory(std::vector<std::string> endpoints) {
  return [endpoints = std::move(endpoints)](ActorId role, std::uint64_t seed) {
    const std::string& e = endpoints.at(std::min<std::size_t>(role, endpoints.size() - 1));
    return make_agent(e, derive_seed(seed, static_cast<std::uint64_t>(role) + 1));
  };
}

struct RunConfig {
  TaskId task = TaskId::optimization;
  std::vector<std::uint64_t> seeds;
  json params = json::object();
  std::vector<std::string> endpoints{"random"};  // one per role, or one for all
  RunMode mode = RunMode::selfplay;
  int cap = 0;  // 0 selects the task default
  int retry_budget = kDefaultRetryBudget;
  int workers = 1;
};

struct EpisodeResult {
  std::uint64_t seed = 0;
  SessionStatus status = SessionStatus::failed;
  std::optional<double> normalized;
  std::optional<double> raw;
  int words = 0;
  int actions = 0;
  int generated = 0;  // actions produced by agents rather than replayed or automatic
  std::string failure;
  std::string log;  // serialized episode log; empty if no world could be built

  bool terminated() const { return status == SessionStatus::terminated; }
};

namespace detail {

inline std::vector<std::string> roster(const std::vector<std::unique_ptr<Agent>>& agents) {
  std::vector<std::string> out;
  for (const auto& a : agents) out.push_back(a->name());
  return out;
}

inline EpisodeResult finish(const SessionState& s, const std::vector<std::string>& names,
                            std::vector<Notice> notices, int generated) {
  EpisodeResult r;
  r.seed = seed_of(s.world());
  r.status = s.status;
  if (const auto score = final_score(s)) {
    r.normalized = score->normalized;
    r.raw = score->raw;
  }
  for (int w : s.words) r.words += w;
  r.actions = s.action_count();
  r.generated = generated;
  r.failure = s.failure;
  r.log = serialize_log(make_log(s, names, std::move(notices)));
  return r;
}

inline EpisodeResult generation_failure(std::uint64_t seed, const std::string& what) {
  EpisodeResult r;
  r.seed = seed;
  r.status = SessionStatus::failed;
  r.failure = what;
  return r;
}

}  // namespace detail

// One self-play episode under strict turn order.
inline EpisodeResult run_episode(TaskId task, std::uint64_t seed, const json& params,
                                 const AgentFactory& factory, int cap = 0,
                                 int retry_budget = kDefaultRetryBudget) {
  World world;
  try {
    world = generate(task, seed, params);
  } catch (const GenerationError& e) {
    return detail::generation_failure(seed, e.what());
  }
  SessionConfig config;
  config.max_actions = cap;
  SessionState s = new_session(std::move(world), config);
  std::vector<std::unique_ptr<Agent>> agents;
  for (ActorId r = 0; r < s.actors(); ++r) agents.push_back(factory(r, seed));
  const std::string session_id = std::string(to_string(task)) + "-" + std::to_string(seed);
  int generated = 0;
  while (!s.over()) {
    const ActorId actor = turn_policy(s);
    try {
      s = request_action(*agents[actor], s, actor, retry_budget, session_id).state;
      ++generated;
    } catch (const ProtocolFailure& e) {
      s = fail_session(s, e.what());
    } catch (const TransportError& e) {
      s = fail_session(s, e.what());
    }
  }
  return detail::finish(s, detail::roster(agents), {}, generated);
}

// Runs `body(i)` for i in [0, n) on a pool of workers.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline std::vector<EpisodeResult> run_selfplay(const RunConfig& config,
                                               const AgentFactory& factory) {
  std::vector<EpisodeResult> out(config.seeds.size());
  parallel_for(config.seeds.size(), config.workers, [&](std::size_t i) {
    out[i] = run_episode(config.task, config.seeds[i], config.params, factory, config.cap,
                         config.retry_budget);
  });
  return out;
}

inline std::vector<EpisodeResult> run_selfplay(const RunConfig& config) {
  return run_selfplay(config, endpoint_factory(config.endpoints));
}

// ---------------------------------------------------------------------------
// Prompted self-play

// Number of source events replayed before agents take over.
inline std::size_t prefix_length(const EpisodeLog& log, RunMode mode) {
  if (mode == RunMode::psp_proposal) {
    for (std::size_t i = log.events.size(); i-- > 0;) {
      if (log.events[i].at("kind") == "propose") return i;
    }
    throw DomainError("the prefix log has no proposal");
  }
  const double fraction = mode == RunMode::psp50 ? 0.5 : 0.75;
  const int wanted = static_cast<int>(std::ceil(fraction * message_count(log)));
  int seen = 0;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    if (seen == wanted) return i;
    seen += log.events[i].at("kind") != "think";
  }
  return log.events.size();
}

// True once live play has come within the forcing window of the source
// dialogue's length.
inline bool forcing_due(int live_words, int prefix_total_words) {
  return live_words >= prefix_total_words - kForcingWindow;
}

// Continues a logged dialogue with agents. The session runs in free turn
// mode so the replayed prefix keeps its original order; the harness itself
// keeps the round-robin cursor for the agent-driven remainder.
inline EpisodeResult run_psp(const EpisodeLog& source, RunMode mode, const AgentFactory& factory,
                             int retry_budget = kDefaultRetryBudget) {
  if (mode == RunMode::selfplay) throw DomainError("run_psp needs a prefix mode");
  try {
    replay(source);
  } catch (const Error& e) {
    throw DomainError(std::string("the prefix log does not replay against its seed: ") +
                      e.what());
  }
  const std::size_t prefix = prefix_length(source, mode);
  SessionConfig config = log_config(source);
  config.turn_mode = TurnMode::free;
  SessionState s = new_session(log_world(source), config, source.header.at("params"));
  s = replay(source, s, prefix);

  const int n = s.actors();
  ActorId cursor = 0;
  if (prefix < source.events.size()) {
    cursor = source.events[prefix].at("sender").get<ActorId>();
  } else if (prefix > 0) {
    cursor = (source.events[prefix - 1].at("sender").get<ActorId>() + 1) % n;
  }

  std::vector<std::unique_ptr<Agent>> agents;
  for (ActorId r = 0; r < n; ++r) agents.push_back(factory(r, source.seed()));
  const std::string session_id =
      std::string(to_string(s.task())) + "-" + std::to_string(source.seed()) + "-psp";
  const int target_words = total_words(source);
  std::vector<Notice> notices;
  bool forcing = mode == RunMode::psp_proposal;
  bool partial_rejected = false;
  int generated = 0;

  auto live_words = [&] {
    int w = 0;
    for (int x : s.words) w += x;
    return w;
  };
  auto respond_automatically = [&]() {
    const PendingProposal p = *s.pending;
    const bool full = is_full(p.payload);
    if (!full && partial_rejected) return;
    for (ActorId r : p.recipients) {
      if (s.over() || !s.pending) break;
      const ActionKind kind = full ? ActionKind::accept : ActionKind::reject;
      s = submit_action(s, {kind, r, std::nullopt, "", std::nullopt}).state;
      s.transcript.back().automatic = true;
      cursor = (r + 1) % n;
    }
    if (!full) partial_rejected = true;
  };

  while (!s.over()) {
    if (!forcing && forcing_due(live_words(), target_words)) forcing = true;
    const ActorId actor = cursor;
    std::vector<std::string> shown;
    if (forcing && may_propose(s.task(), actor) && !must_respond(s, actor)) {
      notices.push_back({static_cast<int>(s.transcript.size()), actor, kForcingNotice});
      shown.push_back(kForcingNotice);
    }
    try {
      const bool only_propose = mode == RunMode::psp_proposal && !shown.empty();
      s = request_action(*agents[actor], s, actor, retry_budget, session_id, shown, only_propose)
              .state;
      ++generated;
    } catch (const ProtocolFailure& e) {
      s = fail_session(s, e.what());
      break;
    } catch (const TransportError& e) {
      s = fail_session(s, e.what());
      break;
    }
    const auto& last = s.transcript.back().action;
    if (last.kind == ActionKind::think) continue;
    cursor = (actor + 1) % n;
    if (forcing && last.kind == ActionKind::propose && !s.over()) respond_automatically();
  }
  return detail::finish(s, detail::roster(agents), std::move(notices), generated);
}

// ---------------------------------------------------------------------------
// Statistics

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
  int n = 0;
};

// Mean and standard error (sample standard deviation over sqrt(n)).
inline MeanSem mean_sem(const std::vector<double>& xs) {
  MeanSem m;
  m.n = static_cast<int>(xs.size());
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / m.n;
  if (m.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sem = std::sqrt(ss / (m.n - 1)) / std::sqrt(static_cast<double>(m.n));
  }
  return m;
}

struct RunSummary {
  bool empty = true;
  int total = 0;
  int terminated = 0;
  int capped = 0;
  int failed = 0;
  MeanSem score;  // over terminated episodes
  MeanSem words;  // over terminated episodes
};

inline RunSummary summarize(const std::vector<EpisodeResult>& rows) {
  RunSummary s;
  s.total = static_cast<int>(rows.size());
  s.empty = rows.empty();
  std::vector<double> scores;
  std::vector<double> words;
  for (const auto& r : rows) {
    switch (r.status) {
      case SessionStatus::terminated:
        ++s.terminated;
        scores.push_back(*r.normalized);
        words.push_back(r.words);
        break;
      case SessionStatus::capped: ++s.capped; break;
      default: ++s.failed; break;
    }
  }
  // Summation order must not depend on input order.
  std::sort(scores.begin(), scores.end());
  std::sort(words.begin(), words.end());
  s.score = mean_sem(scores);
  s.words = mean_sem(words);
  return s;
}

// Rebuilds a result row from a log's footer.
inline EpisodeResult result_from_log(const EpisodeLog& log) {
  if (log.footer.is_null()) throw SchemaError("log has no footer");
  EpisodeResult r;
  r.seed = log.seed();
  const std::string status = log.footer.at("status");
  r.status = status == "terminated" ? SessionStatus::terminated
             : status == "capped"   ? SessionStatus::capped
                                    : SessionStatus::failed;
  if (!log.footer.at("normalized").is_null()) r.normalized = log.footer.at("normalized").get<double>();
  if (!log.footer.at("raw").is_null()) r.raw = log.footer.at("raw").get<double>();
  for (const auto& w : log.footer.at("words")) r.words += w.get<int>();
  r.actions = log.footer.at("actions").get<int>();
  r.failure = log.footer.value("failure", "");
  if (r.terminated() && !r.normalized) throw SchemaError("terminated log without a score");
  return r;
}

inline json mean_sem_json(const MeanSem& m) {
  return {{"mean", m.mean}, {"sem", m.sem}, {"n", m.n}};
}

inline json summary_json(const RunSummary& s, const std::vector<EpisodeResult>& rows) {
  if (s.empty) return {{"empty", true}, {"total", 0}};
  json episodes = json::array();
  for (const auto& r : rows) {
    episodes.push_back({{"seed", r.seed},
                        {"status", to_string(r.status)},
                        {"normalized", r.normalized ? json(*r.normalized) : json(nullptr)},
                        {"words", r.words},
                        {"actions", r.actions},
                        {"terminated", r.terminated()},
                        {"failure", r.failure}});
  }
  return {{"empty", false},
          {"total", s.total},
          {"terminated", s.terminated},
          {"capped", s.capped},
          {"failed", s.failed},
          {"score", mean_sem_json(s.score)},
          {"words", mean_sem_json(s.words)},
          {"episodes", episodes}};
}

}  // namespace decdial

#endif  // DECDIAL_HARNESS_HPP_

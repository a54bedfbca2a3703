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

// Live sessions for browsers and remote agents. Each role holds a bearer
// token and reads a private, gapless stream of frames built only from its
// own view and the events visible to it. Scripted roles act on their turn
// inside the same critical section, so frame order equals action order.

#ifndef DECDIAL_SESSION_SERVICE_HPP_
#define DECDIAL_SESSION_SERVICE_HPP_

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "decdial/agents.hpp"
#include "decdial/bridge.hpp"
#include "decdial/dialogue.hpp"
#include "decdial/episode_log.hpp"
#include "decdial/worldgen.hpp"

namespace decdial {

inline constexpr const char* kHumanSeat = "human";

// Request errors: bad wiring, unknown session, bad credentials.
class RequestError : public Error {
 public:
  RequestError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct SessionOptions {
  bool disclose_final_score = true;
  bool claim_tickets = true;  // hand every human ticket out at creation
  int retry_budget = kDefaultRetryBudget;
  int cap = 0;
};

struct Frame {
  int seq = 0;
  long long time_ms = 0;
  std::string type;  // event | termination | error
  json payload;
};

inline json frame_to_json(const Frame& f) {
  return {{"seq", f.seq}, {"time_ms", f.time_ms}, {"type", f.type}, {"payload", f.payload}};
}

struct Ticket {
  std::string session_id;
  std::string role;
  std::string token;
  TaskId task = TaskId::optimization;
  long long created_at_ms = 0;
};

inline json ticket_to_json(const Ticket& t) {
  return {{"session_id", t.session_id}, {"role", t.role}, {"token", t.token},
          {"task", to_string(t.task)}, {"created_at_ms", t.created_at_ms}};
}

namespace detail {

inline long long now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

inline std::string random_hex(std::size_t bytes) {
  static std::mutex mu;
  static std::random_device device;
  std::lock_guard lock(mu);
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bytes; i += 4) {
    std::uint32_t x = device();
    for (int b = 0; b < 4 && i + b < bytes; ++b, x >>= 8) {
      out += digits[(x >> 4) & 0xf];
      out += digits[x & 0xf];
    }
  }
  return out;
}

}  // namespace detail

class SessionService {
 public:
  struct Created {
    std::string session_id;
    std::uint64_t seed = 0;
    std::vector<Ticket> tickets;
  };

  // wiring: one entry per role, "human" or an agent endpoint.
  Created create_session(TaskId task, std::optional<std::uint64_t> seed,
                         const std::vector<std::string>& wiring, SessionOptions options = {},
                         const json& params = json::object()) {
    const int n = actor_count(task);
    if (static_cast<int>(wiring.size()) != n) {
      throw RequestError(400, "wiring needs exactly " + std::to_string(n) + " roles");
    }
    const std::uint64_t s = seed ? *seed : std::random_device{}();
    auto live = std::make_shared<Live>();
    live->id = detail::random_hex(12);
    live->created_at_ms = detail::now_ms();
    live->start = std::chrono::steady_clock::now();
    live->options = options;
    live->wiring = wiring;
    bool all_human = true;
    for (int r = 0; r < n; ++r) {
      if (wiring[r] == kHumanSeat) {
        live->agents.emplace_back();
      } else {
        all_human = false;
        try {
          live->agents.push_back(make_agent(wiring[r], derive_seed(s, r + 1)));
        } catch (const DomainError& e) {
          throw RequestError(400, e.what());
        }
      }
    }
    SessionConfig config;
    config.turn_mode = all_human ? TurnMode::free : TurnMode::strict;
    config.max_actions = options.cap;
    try {
      live->state = new_session(generate(task, s, params), config);
    } catch (const GenerationError& e) {
      throw RequestError(422, e.what());
    } catch (const DomainError& e) {
      throw RequestError(400, e.what());
    }
    live->frames.resize(n);
    live->tokens.resize(n);
    live->claimed.assign(n, false);
    Created out{live->id, s, {}};
    const auto roles = role_names(task);
    for (int r = 0; r < n; ++r) {
      if (wiring[r] != kHumanSeat) continue;
      live->tokens[r] = detail::random_hex(24);
      if (options.claim_tickets) {
        live->claimed[r] = true;
        out.tickets.push_back({live->id, roles[r], live->tokens[r], task, live->created_at_ms});
      }
    }
    {
      std::lock_guard lock(live->mu);
      drive_agents(*live);
    }
    std::lock_guard lock(mu_);
    sessions_[live->id] = live;
    return out;
  }

  // Hands out an unclaimed human seat.
  Ticket join(const std::string& session_id, const std::string& role) {
    auto live = find(session_id);
    std::lock_guard lock(live->mu);
    ActorId r;
    try {
      r = role_from_name(live->state.task(), role);
    } catch (const DomainError& e) {
      throw RequestError(400, e.what());
    }
    if (live->wiring[r] != kHumanSeat) throw RequestError(409, "role " + role + " is not a human seat");
    if (live->claimed[r]) throw RequestError(409, "role " + role + " is already taken");
    live->claimed[r] = true;
    return {live->id, role, live->tokens[r], live->state.task(), live->created_at_ms};
  }

  json list_sessions() const {
    std::vector<std::shared_ptr<Live>> all;
    {
      std::lock_guard lock(mu_);
      for (const auto& [id, live] : sessions_) all.push_back(live);
    }
    json out = json::array();
    for (const auto& live : all) {
      std::lock_guard lock(live->mu);
      const auto roles = role_names(live->state.task());
      json seats = json::array();
      for (std::size_t r = 0; r < roles.size(); ++r) {
        const bool human = live->wiring[r] == kHumanSeat;
        seats.push_back({{"role", roles[r]},
                         {"kind", human ? "human" : "agent"},
                         {"open", human && !live->claimed[r]}});
      }
      out.push_back({{"session_id", live->id},
                     {"task", to_string(live->state.task())},
                     {"status", to_string(live->state.status)},
                     {"created_at_ms", live->created_at_ms},
                     {"roles", seats}});
    }
    return out;
  }

  json view(const std::string& session_id, const std::string& token) {
    auto live = find(session_id);
    std::lock_guard lock(live->mu);
    const ActorId r = authorize(*live, token);
    const SessionState& s = live->state;
    const AgentView v = make_view(s.world(), r);
    json legal = json::array();
    for (ActionKind k : legal_actions(s, r)) legal.push_back(to_string(k));
    json j{{"session_id", live->id},
           {"task", to_string(s.task())},
           {"role", v.role_name},
           {"actor", r},
           {"view", v.data},
           {"observation", render_observation(v)},
           {"legal", legal},
           {"turn_mode", to_string(s.config.turn_mode)},
           {"turn", s.config.turn_mode == TurnMode::strict ? json(s.turn) : json(nullptr)},
           {"status", to_string(s.status)},
           {"events", visible_events_json(s, r)},
           {"last_seq", static_cast<int>(live->frames[r].size())}};
    if (live->options.disclose_final_score) {
      if (const auto score = final_score(s)) j["final_score"] = score->normalized;
    }
    return j;
  }

  // The full episode log, available once the session is over.
  std::string log(const std::string& session_id, const std::string& token) {
    auto live = find(session_id);
    std::lock_guard lock(live->mu);
    authorize(*live, token);
    if (!live->state.over()) {
      throw RequestError(409, "the log is available when the session ends");
    }
    return serialize_log(make_log(live->state, live->wiring, {}, live->wall_clock_ms));
  }

  // Applies an action for the token's role. Illegal actions raise
  // ActionError (retriable) and also append an error frame for that role.
  json post_action(const std::string& session_id, const std::string& token, const json& body) {
    auto live = find(session_id);
    std::lock_guard lock(live->mu);
    const ActorId r = authorize(*live, token);
    try {
      json a = body;
      a["sender"] = r;
      if (!a.contains("text")) a["text"] = "";
      DialogueAction action = action_from_json(a);
      apply(*live, action);
    } catch (const Error& e) {
      if (dynamic_cast<const RequestError*>(&e)) throw;
      push(*live, r, "error", {{"message", e.what()}});
      live->cv.notify_all();
      throw;
    }
    drive_agents(*live);
    live->cv.notify_all();
    return {{"ok", true}, {"status", to_string(live->state.status)}};
  }

  // Frames with seq > since, waiting up to wait_ms for at least one.
  std::vector<Frame> frames(const std::string& session_id, const std::string& token, int since,
                            int wait_ms = 0) {
    auto live = find(session_id);
    std::unique_lock lock(live->mu);
    const ActorId r = authorize(*live, token);
    auto& mine = live->frames[r];
    if (wait_ms > 0 && static_cast<int>(mine.size()) <= since) {
      live->cv.wait_for(lock, std::chrono::milliseconds(wait_ms),
                        [&] { return static_cast<int>(mine.size()) > since; });
    }
    std::vector<Frame> out;
    for (int i = std::max(since, 0); i < static_cast<int>(mine.size()); ++i) out.push_back(mine[i]);
    return out;
  }

  // Read-only snapshot for tests and tools.
  SessionState state(const std::string& session_id) {
    auto live = find(session_id);
    std::lock_guard lock(live->mu);
    return live->state;
  }

 private:
  struct Live {
    std::string id;
    long long created_at_ms = 0;
    std::chrono::steady_clock::time_point start;
    SessionOptions options;
    std::vector<std::string> wiring;
    std::vector<std::unique_ptr<Agent>> agents;  // empty for human seats
    std::vector<std::string> tokens;
    std::vector<bool> claimed;
    SessionState state;
    std::vector<std::vector<Frame>> frames;  // per role
    std::optional<double> wall_clock_ms;
    mutable std::mutex mu;
    std::condition_variable cv;
  };

  std::shared_ptr<Live> find(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw RequestError(404, "no such session");
    return it->second;
  }

  static ActorId authorize(const Live& live, const std::string& token) {
    if (!token.empty()) {
      for (std::size_t r = 0; r < live.tokens.size(); ++r) {
        if (!live.tokens[r].empty() && live.claimed[r] && live.tokens[r] == token) {
          return static_cast<ActorId>(r);
        }
      }
    }
    throw RequestError(401, "invalid or stale token");
  }

  static void push(Live& live, ActorId r, std::string type, json payload) {
    auto& mine = live.frames[r];
    mine.push_back({static_cast<int>(mine.size()) + 1, detail::now_ms(), std::move(type),
                    std::move(payload)});
  }

  static void fan_out(Live& live, const std::vector<ActorId>& deliver) {
    const SessionState& s = live.state;
    const TranscriptEvent& e = s.transcript.back();
    for (ActorId r : deliver) {
      json p = event_view_json(s, e, r);
      p["turn"] = s.config.turn_mode == TurnMode::strict ? json(s.turn) : json(nullptr);
      push(live, r, "event", std::move(p));
    }
    if (s.over()) finish(live);
  }

  static void finish(Live& live) {
    const SessionState& s = live.state;
    live.wall_clock_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - live.start)
                             .count();
    for (ActorId r = 0; r < s.actors(); ++r) {
      json p{{"status", to_string(s.status)}};
      if (live.options.disclose_final_score) {
        const auto score = final_score(s);
        p["final_score"] = score ? json(score->normalized) : json(nullptr);
      }
      push(live, r, "termination", std::move(p));
    }
  }

  static void apply(Live& live, const DialogueAction& action) {
    Transition t = submit_action(live.state, action);
    live.state = std::move(t.state);
    fan_out(live, t.deliver_to);
  }

  void drive_agents(Live& live) {
    SessionState& s = live.state;
    while (!s.over() && s.config.turn_mode == TurnMode::strict && live.agents[s.turn]) {
      const ActorId r = s.turn;
      try {
        SessionState next =
            request_action(*live.agents[r], s, r, live.options.retry_budget, live.id).state;
        const std::size_t before = s.transcript.size();
        s = std::move(next);
        std::vector<ActorId> deliver = s.transcript.at(before).visible_to;
        std::sort(deliver.begin(), deliver.end());
        deliver.erase(std::unique(deliver.begin(), deliver.end()), deliver.end());
        fan_out(live, deliver);
      } catch (const ProtocolFailure& e) {
        s = fail_session(s, e.what());
        finish(live);
      } catch (const TransportError& e) {
        s = fail_session(s, e.what());
        finish(live);
      }
    }
  }

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
};

}  // namespace decdial

#endif  // DECDIAL_SESSION_SERVICE_HPP_

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

// Agent abstraction, the scripted baselines and the revision loop that
// turns agent replies into legal actions.

#ifndef DECDIAL_AGENTS_HPP_
#define DECDIAL_AGENTS_HPP_

#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "decdial/common.hpp"
#include "decdial/dialogue.hpp"
#include "decdial/proposals.hpp"
#include "decdial/query.hpp"
#include "decdial/rng.hpp"
#include "decdial/solvers.hpp"
#include "decdial/views.hpp"

namespace decdial {

inline constexpr int kDefaultRetryBudget = 3;
inline constexpr int kMaxSearchesPerTurn = 10;
inline constexpr const char* kForcingNotice = "You must make your best final proposal now.";

// Everything an agent may see when asked to act. Built only from the
// role's view and the events visible to it.
struct ActionRequest {
  std::string session_id;
  int turn = 0;  // transcript length when the request was issued
  TaskId task = TaskId::optimization;
  ActorId role = 0;
  std::string role_name;
  std::string observation;
  json view;
  std::string transcript;
  json events;
  std::vector<std::string> legal;
  std::vector<std::string> notices;
  std::optional<std::string> error;        // text of the previous attempt's rejection
  std::optional<std::string> search_result;  // answer to the previous search call
};

inline json request_to_json(const ActionRequest& r) {
  return {{"type", "request"},
          {"session", r.session_id},
          {"turn", r.turn},
          {"task", to_string(r.task)},
          {"role", r.role},
          {"role_name", r.role_name},
          {"observation", r.observation},
          {"view", r.view},
          {"transcript", r.transcript},
          {"events", r.events},
          {"legal", r.legal},
          {"notices", r.notices},
          {"error", r.error ? json(*r.error) : json(nullptr)},
          {"search_result", r.search_result ? json(*r.search_result) : json(nullptr)}};
}

inline ActionRequest make_request(const SessionState& s, ActorId role, std::string session_id,
                                  std::vector<std::string> notices = {}) {
  ActionRequest r;
  r.session_id = std::move(session_id);
  r.turn = static_cast<int>(s.transcript.size());
  r.task = s.task();
  r.role = role;
  const AgentView view = make_view(s.world(), role);
  r.role_name = view.role_name;
  r.observation = render_observation(view);
  r.view = view.data;
  r.transcript = render_transcript(s, role);
  r.events = visible_events_json(s, role);
  for (ActionKind k : legal_actions(s, role)) r.legal.emplace_back(to_string(k));
  r.notices = std::move(notices);
  return r;
}

// An agent reply: an action, or a database search for the planning
// assistant. Searches do not consume the retry budget.
struct AgentReply {
  std::optional<DialogueAction> action;
  std::optional<std::string> search;
  std::string raw_text;  // free-text form "[kind] body", parsed by the loop
  std::optional<ActorId> recipient;  // for raw_text replies
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual AgentReply act(const ActionRequest& request) = 0;
  // Diagnostic agents that read hidden state override this.
  virtual bool privileged() const { return false; }
  virtual AgentReply act_with_state(const ActionRequest& request, const SessionState&) {
    return act(request);
  }
};

inline AgentReply reply_action(ActionKind kind, ActorId sender, std::string text = "",
                               std::optional<ProposalPayload> proposal = std::nullopt,
                               std::optional<ActorId> recipient = std::nullopt) {
  AgentReply r;
  r.action = DialogueAction{kind, sender, recipient, std::move(text), std::move(proposal)};
  return r;
}

inline bool is_legal(const ActionRequest& r, ActionKind kind) {
  const auto k = std::string(to_string(kind));
  return std::find(r.legal.begin(), r.legal.end(), k) != r.legal.end();
}

// Parses "[kind] body" replies. Proposals are read through the sender's view.
inline DialogueAction parse_action_text(const ActionRequest& r, const std::string& text,
                                        std::optional<ActorId> recipient = std::nullopt) {
  static const std::regex head(R"(^\s*\[(message|think|propose|accept|reject)\]\s*([\s\S]*)$)");
  std::smatch m;
  if (!std::regex_match(text, m, head)) {
    throw ActionError(
        "Your reply must start with [message], [think], [propose], [accept] or [reject].");
  }
  DialogueAction a;
  a.kind = action_kind_from_string(m[1].str());
  a.sender = r.role;
  a.recipient = recipient;
  a.text = trim(m[2].str());
  if (a.kind == ActionKind::propose) {
    if (!is_legal(r, ActionKind::propose)) throw ActionError("You cannot send [propose].");
    AgentView view{r.task, r.role, r.role_name, r.view};
    a.proposal = parse_proposal_text(view, a.text);
    a.text.clear();
  }
  return a;
}

// ---------------------------------------------------------------------------
// Scripted baselines

// Proposes a uniformly random full decision as soon as it may and accepts
// anything. Roles that cannot propose send a short message.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
  std::string name() const override { return "random"; }

  AgentReply act(const ActionRequest& r) override {
    if (is_legal(r, ActionKind::accept)) return reply_action(ActionKind::accept, r.role);
    if (is_legal(r, ActionKind::propose)) {
      return reply_action(ActionKind::propose, r.role, "", draw(r));
    }
    return reply_action(ActionKind::message, r.role, "Please send a proposal.", std::nullopt,
                        r.task == TaskId::mediation ? std::optional<ActorId>(2) : std::nullopt);
  }

 private:
  ProposalPayload draw(const ActionRequest& r) {
    switch (r.task) {
      case TaskId::optimization: {
        Matching m;
        m.assignment.resize(r.view.at("reviewers").size());
        std::iota(m.assignment.begin(), m.assignment.end(), 0);
        rng_.shuffle(m.assignment);
        return m;
      }
      case TaskId::planning: {
        std::vector<int> ids(r.view.at("sites").size());
        std::iota(ids.begin(), ids.end(), 0);
        rng_.shuffle(ids);
        Itinerary it;
        const int k = r.view.at("k").get<int>();
        for (int i = 0; i < k; ++i) it.slots.emplace_back(ids.at(i));
        return it;
      }
      case TaskId::mediation: {
        FlightChoice fc;
        for (const auto& u : r.view.at("users")) {
          const auto& flights = u.at("flights");
          const auto pick = rng_.uniform_int(0, static_cast<std::int64_t>(flights.size()) - 1);
          fc.flights.emplace_back(flights.at(pick).at("id").get<int>());
        }
        return fc;
      }
    }
    throw DomainError("unknown task");
  }

  Rng rng_;
};

// Test and diagnostic agent with full world access. Proposes the solver
// optimum; as a responder accepts iff the proposal scores within 1e-9 of
// the optimum it would propose itself.
class OracleAgent : public Agent {
 public:
  std::string name() const override { return "oracle"; }
  bool privileged() const override { return true; }

  AgentReply act(const ActionRequest&) override {
    throw CapabilityError("the oracle agent needs the session state");
  }

  AgentReply act_with_state(const ActionRequest& r, const SessionState& s) override {
    if (is_legal(r, ActionKind::accept)) {
      const auto& p = s.pending->payload;
      bool good = false;
      if (is_full(p)) {
        good = score_decision(s.world(), p, s.ctx->range).normalized >= optimum(s) - 1e-9;
      }
      return reply_action(good ? ActionKind::accept : ActionKind::reject, r.role);
    }
    if (is_legal(r, ActionKind::propose)) {
      return reply_action(ActionKind::propose, r.role, "", best(s.world()));
    }
    return reply_action(ActionKind::message, r.role, "Ready for a proposal.", std::nullopt,
                        r.task == TaskId::mediation ? std::optional<ActorId>(2) : std::nullopt);
  }

  static ProposalPayload best(const World& world) {
    if (const auto* w = std::get_if<OptimizationWorld>(&world)) {
      return best_matching(impute_pooled(*w).values).decision;
    }
    if (const auto* w = std::get_if<PlanningWorld>(&world)) {
      return best_worst_itinerary(*w).first.decision;
    }
    return best_worst_flightpair(std::get<MediationWorld>(world)).first.decision;
  }

 private:
  static double optimum(const SessionState& s) {
    return score_decision(s.world(), best(s.world()), s.ctx->range).normalized;
  }
};

// ---------------------------------------------------------------------------
// Revision loop

struct TurnResult {
  SessionState state;
  int attempts = 0;
  int searches = 0;
};

// Asks `agent` for `role`'s next action and applies it. Rejected replies
// are re-requested with the rejection text attached, up to `retry_budget`
// attempts in total; exhausting the budget raises ProtocolFailure.
// TransportError from the agent propagates. With `propose_only` set, the
// only acceptable reply is a proposal.
inline TurnResult request_action(Agent& agent, const SessionState& s, ActorId role,
                                 int retry_budget = kDefaultRetryBudget,
                                 const std::string& session_id = "local",
                                 const std::vector<std::string>& notices = {},
                                 bool propose_only = false) {
  if (retry_budget < 1) throw DomainError("retry budget must be at least 1");
  ActionRequest req = make_request(s, role, session_id, notices);
  if (propose_only) req.legal = {std::string(to_string(ActionKind::propose))};
  TurnResult out{s, 0, 0};
  std::optional<QueryDatabase> db;
  while (out.attempts < retry_budget) {
    AgentReply reply = agent.privileged() ? agent.act_with_state(req, s) : agent.act(req);
    req.search_result.reset();
    if (reply.search) {
      if (s.task() != TaskId::planning || role != 1 || ++out.searches > kMaxSearchesPerTurn) {
        ++out.attempts;
        req.error = out.searches > kMaxSearchesPerTurn
                        ? "You have searched enough this turn. Send an action now."
                        : "You cannot search.";
        continue;
      }
      if (!db) db = query_database(std::get<PlanningWorld>(s.world()));
      req.search_result = run_search(*reply.search, *db);
      req.error.reset();
      continue;
    }
    ++out.attempts;
    try {
      DialogueAction a = reply.action ? *reply.action
                                   : parse_action_text(req, reply.raw_text, reply.recipient);
      if (a.sender != role) throw ActionError("You can only act as " + req.role_name + ".");
      if (propose_only && a.kind != ActionKind::propose) throw ActionError(kForcingNotice);
      out.state = submit_action(s, a).state;
      return out;
    } catch (const ActionError& e) {
      req.error = e.what();
    } catch (const SchemaError& e) {
      req.error = e.what();
    } catch (const DomainError& e) {
      req.error = e.what();
    }
  }
  throw ProtocolFailure(req.role_name + " gave no legal action in " +
                        std::to_string(retry_budget) + " attempts; last error: " +
                        req.error.value_or(""));
}

}  // namespace decdial

#endif  // DECDIAL_AGENTS_HPP_

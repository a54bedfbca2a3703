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

// The dialogue session state machine. Every transition is a pure function
// of (state, action); the world and its score range are shared read-only.
//
// Proposal lifecycle: a proposal becomes pending and each recipient must
// answer with [accept] or [reject] on their next turn. Any reject clears it.
// When every recipient accepts a full decision the session terminates.
// Accepting a partial decision is recorded but does not end the game.

#ifndef DECDIAL_DIALOGUE_HPP_
#define DECDIAL_DIALOGUE_HPP_

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "decdial/common.hpp"
#include "decdial/decisions.hpp"
#include "decdial/proposals.hpp"
#include "decdial/scoring.hpp"
#include "decdial/views.hpp"
#include "decdial/worlds.hpp"

namespace decdial {

enum class ActionKind { message, think, propose, accept, reject };

inline std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::message: return "message";
    case ActionKind::think: return "think";
    case ActionKind::propose: return "propose";
    case ActionKind::accept: return "accept";
    case ActionKind::reject: return "reject";
  }
  return "unknown";
}

inline ActionKind action_kind_from_string(std::string_view s) {
  if (s == "message") return ActionKind::message;
  if (s == "think") return ActionKind::think;
  if (s == "propose") return ActionKind::propose;
  if (s == "accept") return ActionKind::accept;
  if (s == "reject") return ActionKind::reject;
  throw SchemaError("unknown action kind: " + std::string(s));
}

struct DialogueAction {
  ActionKind kind = ActionKind::message;
  ActorId sender = 0;
  std::optional<ActorId> recipient;
  std::string text;
  std::optional<ProposalPayload> proposal;
  bool operator==(const DialogueAction&) const = default;
};

inline json action_to_json(const DialogueAction& a) {
  json j{{"kind", to_string(a.kind)}, {"sender", a.sender}, {"text", a.text}};
  j["recipient"] = a.recipient ? json(*a.recipient) : json(nullptr);
  j["proposal"] = a.proposal ? payload_to_json(*a.proposal) : json(nullptr);
  return j;
}

inline DialogueAction action_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("an action must be an object");
  try {
    DialogueAction a;
    a.kind = action_kind_from_string(j.at("kind").get<std::string>());
    a.sender = j.at("sender").get<ActorId>();
    a.text = j.value("text", "");
    if (j.contains("recipient") && !j.at("recipient").is_null()) {
      a.recipient = j.at("recipient").get<ActorId>();
    }
    if (j.contains("proposal") && !j.at("proposal").is_null()) {
      a.proposal = payload_from_json(j.at("proposal"));
    }
    return a;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed action: ") + e.what());
  }
}

// Count of maximal runs of non-whitespace characters.
inline int word_count(std::string_view text) {
  int n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

// Strict: actors take turns in a fixed cycle. Free: anyone may act at any
// time, used when every seat is held by a human.
enum class TurnMode { strict, free };

inline constexpr int kMaxThinksPerTurn = 5;

inline int default_action_cap(TaskId task) { return task == TaskId::mediation ? 45 : 30; }

struct SessionConfig {
  TurnMode turn_mode = TurnMode::strict;
  int max_actions = 0;  // 0 selects the task default
};

struct SessionContext {
  World world;
  ScoreRange range;
  json params;
};

struct PendingProposal {
  ProposalPayload payload;
  ActorId proposer = 0;
  std::vector<ActorId> recipients;
  std::map<ActorId, bool> responses;  // true for accept
  int event_index = 0;
};

struct TranscriptEvent {
  int index = 0;
  DialogueAction action;
  std::vector<ActorId> visible_to;
  std::map<ActorId, std::string> feedback;  // scorecard text per recipient
  bool automatic = false;                    // injected by the harness, not chosen by an agent

  bool visible(ActorId a) const {
    return std::find(visible_to.begin(), visible_to.end(), a) != visible_to.end();
  }
};

enum class SessionStatus { active, terminated, capped, failed };

inline std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::active: return "active";
    case SessionStatus::terminated: return "terminated";
    case SessionStatus::capped: return "capped";
    case SessionStatus::failed: return "failed";
  }
  return "unknown";
}

struct SessionState {
  std::shared_ptr<const SessionContext> ctx;
  SessionConfig config;
  std::vector<TranscriptEvent> transcript;
  std::optional<PendingProposal> pending;
  ActorId turn = 0;
  int thinks_this_turn = 0;
  SessionStatus status = SessionStatus::active;
  std::string failure;
  std::vector<int> words;  // per-actor word ledger
  std::optional<ProposalPayload> final_decision;
  std::array<std::optional<int>, 2> accepted_flights;  // mediation only

  const World& world() const { return ctx->world; }
  TaskId task() const { return task_of(ctx->world); }
  int actors() const { return actor_count(task()); }
  bool terminal() const { return status == SessionStatus::terminated; }
  bool over() const { return status != SessionStatus::active; }
  int cap() const { return config.max_actions > 0 ? config.max_actions : default_action_cap(task()); }

  // Actions that count toward the cap: everything except think.
  int action_count() const {
    return static_cast<int>(std::count_if(transcript.begin(), transcript.end(), [](const auto& e) {
      return e.action.kind != ActionKind::think;
    }));
  }
};

inline SessionState new_session(World world, SessionConfig config = {}, json params = nullptr) {
  auto ctx = std::make_shared<SessionContext>();
  ctx->range = score_range(world);
  ctx->params = params.is_null() ? params_json(world) : std::move(params);
  ctx->world = std::move(world);
  SessionState s;
  s.ctx = std::move(ctx);
  s.config = config;
  s.words.assign(s.actors(), 0);
  return s;
}

// Roles allowed to propose: both agents in optimization, only the
// assistant otherwise.
inline bool may_propose(TaskId task, ActorId actor) {
  switch (task) {
    case TaskId::optimization: return true;
    case TaskId::planning: return actor == 1;
    case TaskId::mediation: return actor == 2;
  }
  return false;
}

inline void check_actor(const SessionState& s, ActorId actor) {
  if (actor < 0 || actor >= s.actors()) {
    throw DomainError("unknown actor " + std::to_string(actor));
  }
}

// True when `actor` owes a response to the pending proposal.
inline bool must_respond(const SessionState& s, ActorId actor) {
  if (!s.pending || actor == s.pending->proposer) return false;
  const auto& r = s.pending->recipients;
  return std::find(r.begin(), r.end(), actor) != r.end() && !s.pending->responses.count(actor);
}

inline std::set<ActionKind> legal_actions(const SessionState& s, ActorId actor) {
  check_actor(s, actor);
  if (s.over()) return {};
  if (must_respond(s, actor)) return {ActionKind::accept, ActionKind::reject};
  std::set<ActionKind> out{ActionKind::message, ActionKind::think};
  if (may_propose(s.task(), actor)) out.insert(ActionKind::propose);
  return out;
}

inline ActorId turn_policy(const SessionState& s) { return s.turn; }

struct Transition {
  SessionState state;
  std::vector<ActorId> deliver_to;  // actors who receive the new event
};

namespace detail {

inline std::string kind_tag(ActionKind k) { return "[" + std::string(to_string(k)) + "]"; }

inline std::map<ActorId, std::string> proposal_feedback(const SessionState& s,
                                                        const ProposalPayload& p,
                                                        const std::vector<ActorId>& recipients) {
  std::map<ActorId, std::string> out;
  if (const auto* w = std::get_if<PlanningWorld>(&s.world())) {
    const std::string text =
        render_feedback(planning_breakdown(*w, std::get<Itinerary>(p)), TaskId::planning);
    for (ActorId r : recipients) out[r] = text;
  } else if (const auto* w = std::get_if<MediationWorld>(&s.world())) {
    const auto& fc = std::get<FlightChoice>(p);
    for (ActorId u : recipients) {
      std::optional<int> other = fc.flights[1 - u];
      if (!other) other = s.accepted_flights[1 - u];
      out[u] = render_feedback(flight_breakdown(*w, u, *fc.flights[u], other), TaskId::mediation);
    }
  }
  return out;
}

inline void advance_turn(SessionState& s) {
  s.turn = (s.turn + 1) % s.actors();
  s.thinks_this_turn = 0;
}

}  // namespace detail

// Applies one action. Illegal actions raise ActionError whose text is meant
// for the acting agent; malformed proposals raise SchemaError or DomainError.
inline Transition submit_action(const SessionState& state, DialogueAction action) {
  if (state.over()) throw ActionError("The dialogue is over.");
  check_actor(state, action.sender);
  const TaskId task = state.task();
  const ActorId sender = action.sender;
  if (state.config.turn_mode == TurnMode::strict && sender != state.turn) {
    throw ActionError("It is not your turn.");
  }
  const auto legal = legal_actions(state, sender);
  if (!legal.count(action.kind)) {
    if (must_respond(state, sender)) {
      throw ActionError("You must respond to the proposal with [accept] or [reject].");
    }
    throw ActionError("You cannot send " + detail::kind_tag(action.kind) + ".");
  }

  SessionState s = state;
  TranscriptEvent ev;
  ev.index = static_cast<int>(s.transcript.size());

  switch (action.kind) {
    case ActionKind::think: {
      if (s.thinks_this_turn >= kMaxThinksPerTurn) {
        throw ActionError("You have thought enough this turn. Send a message now.");
      }
      action.text = trim(action.text);
      if (action.text.empty()) throw ActionError("A [think] needs text.");
      action.recipient.reset();
      action.proposal.reset();
      ev.visible_to = {sender};
      ++s.thinks_this_turn;
      break;
    }
    case ActionKind::message: {
      action.text = trim(action.text);
      if (action.text.empty()) throw ActionError("A [message] needs text.");
      action.proposal.reset();
      if (task == TaskId::mediation) {
        if (sender == 2) {
          if (!action.recipient || (*action.recipient != 0 && *action.recipient != 1)) {
            throw ActionError("Address your message to user 0 or user 1.");
          }
        } else {
          if (action.recipient && *action.recipient != 2) {
            throw ActionError("You can only message the assistant.");
          }
          action.recipient = 2;
        }
      } else {
        const ActorId other = 1 - sender;
        if (action.recipient && *action.recipient != other) {
          throw ActionError("You can only message your partner.");
        }
        action.recipient = other;
      }
      ev.visible_to = {sender, *action.recipient};
      s.words[sender] += word_count(action.text);
      break;
    }
    case ActionKind::propose: {
      if (!action.proposal) throw SchemaError("a [propose] action needs a proposal");
      check_proposal(s.world(), *action.proposal);
      const auto recipients = proposal_recipients(s.world(), *action.proposal, sender);
      action.text = proposal_text(s.world(), *action.proposal);
      action.recipient =
          recipients.size() == 1 ? std::optional<ActorId>(recipients.front()) : std::nullopt;
      ev.visible_to = recipients;
      ev.visible_to.insert(ev.visible_to.begin(), sender);
      ev.feedback = detail::proposal_feedback(s, *action.proposal, recipients);
      s.pending = PendingProposal{*action.proposal, sender, recipients, {}, ev.index};
      s.words[sender] += word_count(action.text);
      break;
    }
    case ActionKind::accept:
    case ActionKind::reject: {
      if (!trim(action.text).empty()) {
        throw ActionError(detail::kind_tag(action.kind) + " carries no text.");
      }
      action.text.clear();
      action.proposal.reset();
      PendingProposal& p = *s.pending;
      action.recipient = p.proposer;
      ev.visible_to = {sender, p.proposer};
      const bool accept = action.kind == ActionKind::accept;
      p.responses[sender] = accept;
      if (accept) {
        if (const auto* fc = std::get_if<FlightChoice>(&p.payload)) {
          s.accepted_flights[sender] = fc->flights[sender];
        }
      }
      if (!accept) {
        s.pending.reset();
      } else if (p.responses.size() == p.recipients.size()) {
        if (is_full(p.payload)) {
          s.final_decision = p.payload;
          s.status = SessionStatus::terminated;
        }
        s.pending.reset();
      }
      break;
    }
  }

  ev.action = std::move(action);
  s.transcript.push_back(ev);
  if (ev.action.kind != ActionKind::think) {
    if (s.config.turn_mode == TurnMode::strict) {
      detail::advance_turn(s);
    } else {
      s.thinks_this_turn = 0;
    }
    if (!s.over() && s.action_count() >= s.cap()) s.status = SessionStatus::capped;
  }
  std::vector<ActorId> deliver = ev.visible_to;
  std::sort(deliver.begin(), deliver.end());
  deliver.erase(std::unique(deliver.begin(), deliver.end()), deliver.end());
  return {std::move(s), std::move(deliver)};
}

// Marks the session failed, e.g. when an agent exhausts its retries.
inline SessionState fail_session(const SessionState& state, std::string reason) {
  SessionState s = state;
  s.status = SessionStatus::failed;
  s.failure = std::move(reason);
  return s;
}

// Normalized score of the accepted decision; empty unless terminated.
inline std::optional<NormalizedScore> final_score(const SessionState& s) {
  if (!s.terminal() || !s.final_decision) return std::nullopt;
  return score_decision(s.world(), *s.final_decision, s.ctx->range);
}

// ---------------------------------------------------------------------------
// Role-filtered rendering

inline std::string speaker_label(TaskId task, ActorId speaker, ActorId viewer) {
  if (speaker == viewer) return "You";
  switch (task) {
    case TaskId::optimization: return "Partner";
    case TaskId::planning: return viewer == 0 ? "Agent" : "User";
    case TaskId::mediation: return viewer == 2 ? "User " + std::to_string(speaker) : "Agent";
  }
  return "";
}

// One transcript event as `viewer` sees it, or "" if it is not visible.
inline std::string render_event(const SessionState& s, const TranscriptEvent& e, ActorId viewer) {
  if (!e.visible(viewer)) return "";
  const DialogueAction& a = e.action;
  std::string who = speaker_label(s.task(), a.sender, viewer);
  if (s.task() == TaskId::mediation && a.sender == 2 && viewer == 2 &&
      (a.kind == ActionKind::message || a.kind == ActionKind::propose)) {
    who += " to " + (a.recipient ? std::to_string(*a.recipient) : std::string("all"));
  }
  std::string body = a.text;
  const auto fb = e.feedback.find(viewer);
  if (a.kind == ActionKind::propose) {
    body = proposal_text_for(s.world(), *a.proposal, viewer);
  }
  std::string out = who + ": " + detail::kind_tag(a.kind);
  if (!body.empty()) out += " " + body;
  out += "\n";
  if (fb != e.feedback.end()) {
    std::string card = fb->second;
    // A mediation scorecard opens with the flight row already printed above.
    if (s.task() == TaskId::mediation) card.erase(0, card.find('\n') + 1);
    out += card;
  }
  return out;
}

inline std::string render_transcript(const SessionState& s, ActorId viewer) {
  std::string out;
  for (const auto& e : s.transcript) out += render_event(s, e, viewer);
  return out;
}

// Structured form of an event for one viewer. Mediation users see only
// their own flight in a proposal.
inline json event_view_json(const SessionState& s, const TranscriptEvent& e, ActorId viewer) {
  const DialogueAction& a = e.action;
  json j{{"index", e.index},
         {"sender", a.sender},
         {"sender_role", role_names(s.task()).at(a.sender)},
         {"kind", to_string(a.kind)}};
  j["recipient"] = a.recipient ? json(*a.recipient) : json(nullptr);
  j["text"] = a.kind == ActionKind::propose ? proposal_text_for(s.world(), *a.proposal, viewer)
                                            : a.text;
  if (a.proposal) {
    ProposalPayload p = *a.proposal;
    if (auto* fc = std::get_if<FlightChoice>(&p); fc && viewer < 2) {
      fc->flights[1 - viewer].reset();
    }
    j["proposal"] = payload_to_json(p);
  } else {
    j["proposal"] = nullptr;
  }
  const auto fb = e.feedback.find(viewer);
  j["feedback"] = fb != e.feedback.end() ? json(fb->second) : json(nullptr);
  return j;
}

inline json visible_events_json(const SessionState& s, ActorId viewer) {
  json out = json::array();
  for (const auto& e : s.transcript) {
    if (e.visible(viewer)) out.push_back(event_view_json(s, e, viewer));
  }
  return out;
}

}  // namespace decdial

#endif  // DECDIAL_DIALOGUE_HPP_

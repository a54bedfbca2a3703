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

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace decdial {
namespace {

using Kinds = std::set<ActionKind>;
const Kinds kTalk{ActionKind::message, ActionKind::think};
const Kinds kTalkOrPropose{ActionKind::message, ActionKind::think, ActionKind::propose};
const Kinds kRespond{ActionKind::accept, ActionKind::reject};

DialogueAction say(ActorId from, std::string text, std::optional<ActorId> to = std::nullopt) {
  return {ActionKind::message, from, to, std::move(text), std::nullopt};
}
DialogueAction think(ActorId from, std::string text) {
  return {ActionKind::think, from, std::nullopt, std::move(text), std::nullopt};
}
DialogueAction propose(ActorId from, ProposalPayload p) {
  return {ActionKind::propose, from, std::nullopt, "", std::move(p)};
}
DialogueAction respond(ActorId from, bool accept) {
  return {accept ? ActionKind::accept : ActionKind::reject, from, std::nullopt, "", std::nullopt};
}
SessionState apply(const SessionState& s, const DialogueAction& a) {
  return submit_action(s, a).state;
}
std::string action_error(const SessionState& s, const DialogueAction& a) {
  try {
    submit_action(s, a);
  } catch (const ActionError& e) {
    return e.what();
  }
  return "";
}

Matching identity(int k) {
  Matching m;
  for (int i = 0; i < k; ++i) m.assignment.push_back(i);
  return m;
}

TEST(LegalActions, OptimizationBothMayPropose) {
  const auto s = new_session(generate(TaskId::optimization, 0));
  EXPECT_EQ(legal_actions(s, 0), kTalkOrPropose);
  EXPECT_EQ(legal_actions(s, 1), kTalkOrPropose);
  const auto p = apply(s, propose(0, identity(8)));
  EXPECT_EQ(legal_actions(p, 1), kRespond);
  EXPECT_EQ(legal_actions(p, 0), kTalkOrPropose);
}

TEST(LegalActions, OnlyTheAssistantProposesInPlanningAndMediation) {
  const auto plan = new_session(generate(TaskId::planning, 0));
  EXPECT_EQ(legal_actions(plan, 0), kTalk);
  EXPECT_EQ(legal_actions(plan, 1), kTalkOrPropose);
  const auto med = new_session(generate(TaskId::mediation, 0));
  EXPECT_EQ(legal_actions(med, 0), kTalk);
  EXPECT_EQ(legal_actions(med, 1), kTalk);
  EXPECT_EQ(legal_actions(med, 2), kTalkOrPropose);
}

TEST(LegalActions, ProposalForcesAResponse) {
  auto s = new_session(generate(TaskId::planning, 1));
  s = apply(s, say(0, "Hi, I want a quiet evening."));
  s = apply(s, propose(1, to_itinerary({0, 1, 2})));
  EXPECT_EQ(legal_actions(s, 0), kRespond);
  EXPECT_EQ(action_error(s, say(0, "Hmm")),
            "You must respond to the proposal with [accept] or [reject].");
  EXPECT_EQ(action_error(s, think(0, "Hmm")),
            "You must respond to the proposal with [accept] or [reject].");
}

TEST(SubmitAction, UsersCannotPropose) {
  const auto s = new_session(generate(TaskId::planning, 1));
  EXPECT_EQ(action_error(s, propose(0, to_itinerary({0, 1, 2}))), "You cannot send [propose].");
}

TEST(SubmitAction, StrictTurnsRejectOutOfTurnActions) {
  const auto s = new_session(generate(TaskId::optimization, 0));
  EXPECT_EQ(turn_policy(s), 0);
  EXPECT_EQ(action_error(s, say(1, "me first")), "It is not your turn.");
  const auto t = apply(s, say(0, "hello"));
  EXPECT_EQ(turn_policy(t), 1);
}

TEST(SubmitAction, RejectClearsThePendingProposal) {
  auto s = new_session(generate(TaskId::optimization, 2));
  s = apply(s, propose(0, identity(8)));
  ASSERT_TRUE(s.pending);
  s = apply(s, respond(1, false));
  EXPECT_FALSE(s.pending);
  EXPECT_EQ(s.status, SessionStatus::active);
  EXPECT_EQ(legal_actions(s, 1), kTalkOrPropose);
}

TEST(SubmitAction, AcceptingAFullDecisionTerminates) {
  auto s = new_session(generate(TaskId::optimization, 2));
  s = apply(s, propose(0, identity(8)));
  s = apply(s, respond(1, true));
  EXPECT_EQ(s.status, SessionStatus::terminated);
  ASSERT_TRUE(s.final_decision);
  EXPECT_TRUE(final_score(s));
  EXPECT_EQ(action_error(s, say(0, "one more thing")), "The dialogue is over.");
  EXPECT_TRUE(legal_actions(s, 0).empty());
}

TEST(SubmitAction, ResponsesCarryNoText) {
  auto s = new_session(generate(TaskId::optimization, 2));
  s = apply(s, propose(0, identity(8)));
  auto a = respond(1, true);
  a.text = "sure";
  EXPECT_EQ(action_error(s, a), "[accept] carries no text.");
}

TEST(SubmitAction, PlanningTerminatesOnlyOnFullItineraries) {
  // Every two-slot payload shape.
  const World w = generate(TaskId::planning, 5, {{"k", 2}});
  const std::vector<Itinerary> shapes{{{0, 1}}, {{0, std::nullopt}}, {{std::nullopt, 1}},
                                      {{std::nullopt, std::nullopt}}};
  for (const auto& it : shapes) {
    auto s = new_session(w);
    s = apply(s, say(0, "Hello"));
    s = apply(s, propose(1, it));
    s = apply(s, respond(0, true));
    EXPECT_EQ(s.terminal(), itinerary_is_full(it));
    EXPECT_FALSE(s.pending);
  }
}

TEST(SubmitAction, MalformedProposalsLeaveTheStateUntouched) {
  const auto s = new_session(generate(TaskId::optimization, 3));
  Matching bad = identity(8);
  bad.assignment[1] = 0;
  EXPECT_THROW(submit_action(s, propose(0, bad)), Error);
  EXPECT_FALSE(s.pending);
  EXPECT_TRUE(s.transcript.empty());
  EXPECT_THROW(submit_action(s, propose(0, to_itinerary({0, 1, 2}))), Error);
}

TEST(Mediation, TerminatesWhenBothUsersAcceptOneFullProposal) {
  auto s = new_session(generate(TaskId::mediation, 4));
  s = apply(s, say(0, "I would rather not miss my standup."));
  s = apply(s, say(1, "Cheap flights please."));
  s = apply(s, propose(2, FlightChoice{{3, 7}}));
  EXPECT_EQ(legal_actions(s, 0), kRespond);
  EXPECT_EQ(legal_actions(s, 1), kRespond);
  s = apply(s, respond(0, true));
  EXPECT_EQ(s.status, SessionStatus::active);
  s = apply(s, respond(1, true));
  EXPECT_EQ(s.status, SessionStatus::terminated);
}

TEST(Mediation, OneRejectionReopensTheTable) {
  auto s = new_session(generate(TaskId::mediation, 4));
  s = apply(s, say(0, "hi"));
  s = apply(s, say(1, "hi"));
  s = apply(s, propose(2, FlightChoice{{3, 7}}));
  s = apply(s, respond(0, true));
  s = apply(s, respond(1, false));
  EXPECT_FALSE(s.pending);
  EXPECT_FALSE(s.terminal());
}

TEST(Mediation, ProposalToOneUserDoesNotBindTheOther) {
  auto s = new_session(generate(TaskId::mediation, 4));
  s = apply(s, say(0, "hi"));
  s = apply(s, say(1, "hi"));
  s = apply(s, propose(2, FlightChoice{{3, std::nullopt}}));
  EXPECT_EQ(legal_actions(s, 0), kRespond);
  EXPECT_EQ(legal_actions(s, 1), kTalk);
  s = apply(s, respond(0, true));
  EXPECT_FALSE(s.terminal());
  EXPECT_EQ(s.accepted_flights[0], 3);
}

TEST(Mediation, AssistantMustAddressAUser) {
  auto s = new_session(generate(TaskId::mediation, 4));
  s = apply(s, say(0, "hi"));
  s = apply(s, say(1, "hi"));
  EXPECT_EQ(action_error(s, say(2, "hello")), "Address your message to user 0 or user 1.");
  const auto t = submit_action(s, say(2, "hello", 1));
  EXPECT_EQ(t.deliver_to, (std::vector<ActorId>{1, 2}));
}

TEST(Visibility, PrivateMessagesAndScorecards) {
  auto s = new_session(generate(TaskId::mediation, 8));
  s = apply(s, say(0, "My budget is tight."));
  s = apply(s, say(1, "Anything works."));
  s = apply(s, say(2, "Noted, thanks.", 0));
  EXPECT_EQ(render_transcript(s, 1), "You: [message] Anything works.\n");
  EXPECT_EQ(render_transcript(s, 0),
            "You: [message] My budget is tight.\nAgent: [message] Noted, thanks.\n");
  EXPECT_NE(render_transcript(s, 2).find("You to 0: [message] Noted, thanks."), std::string::npos);
  s = apply(s, say(0, "ok"));
  s = apply(s, say(1, "ok"));
  s = apply(s, propose(2, FlightChoice{{1, 2}}));
  const auto& ev = s.transcript.back();
  EXPECT_EQ(ev.feedback.size(), 2u);
  EXPECT_FALSE(ev.feedback.count(2));
  const json v0 = event_view_json(s, ev, 0);
  EXPECT_EQ(v0["proposal"]["flights"][0], 1);
  EXPECT_TRUE(v0["proposal"]["flights"][1].is_null());
  EXPECT_EQ(v0["feedback"], ev.feedback.at(0));
}

TEST(Visibility, ThinkIsPrivate) {
  auto s = new_session(generate(TaskId::optimization, 1));
  s = apply(s, think(0, "Reviewer 3 fits paper 2."));
  EXPECT_EQ(render_transcript(s, 1), "");
  EXPECT_EQ(render_transcript(s, 0), "You: [think] Reviewer 3 fits paper 2.\n");
}

TEST(Visibility, PlanningUserSeesTheScorecardUnderTheProposal) {
  auto s = new_session(generate(TaskId::planning, 2));
  s = apply(s, say(0, "Hello"));
  s = apply(s, propose(1, to_itinerary({4, 5, 6})));
  const std::string user = render_transcript(s, 0);
  EXPECT_NE(user.find("Agent: [propose] "), std::string::npos);
  EXPECT_NE(user.find("\nProposal Score:\n"), std::string::npos);
  EXPECT_EQ(render_transcript(s, 1).find("Proposal Score:"), std::string::npos);
}

TEST(Thinking, DoesNotAdvanceTheTurnAndIsLimited) {
  auto s = new_session(generate(TaskId::optimization, 1));
  for (int i = 0; i < kMaxThinksPerTurn; ++i) s = apply(s, think(0, "hmm"));
  EXPECT_EQ(s.turn, 0);
  EXPECT_EQ(s.action_count(), 0);
  EXPECT_EQ(action_error(s, think(0, "hmm")),
            "You have thought enough this turn. Send a message now.");
  s = apply(s, say(0, "done"));
  EXPECT_EQ(s.turn, 1);
  EXPECT_EQ(s.thinks_this_turn, 0);
}

TEST(Cap, StopsTheDialogueAfterMaxActions) {
  auto s = new_session(generate(TaskId::optimization, 1), {TurnMode::strict, 3});
  for (int i = 0; i < 3; ++i) {
    s = apply(s, think(s.turn, "x"));
    s = apply(s, say(s.turn, "x"));
  }
  EXPECT_EQ(s.status, SessionStatus::capped);
  EXPECT_FALSE(final_score(s));
  EXPECT_EQ(default_action_cap(TaskId::mediation), 45);
}

TEST(Ledger, WordsAddUpAcrossRandomDialogues) {
  Rng rng(99);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<std::unique_ptr<Agent>> agents;
    const TaskId task = static_cast<TaskId>(seed % 3);
    for (int a = 0; a < actor_count(task); ++a) {
      agents.push_back(std::make_unique<testing::ChattyAgent>(static_cast<int>(rng.index(6)),
                                                              seed * 7 + a));
    }
    const auto s = testing::play(new_session(generate(task, seed)), agents);
    std::vector<int> expected(s.actors(), 0);
    for (const auto& e : s.transcript) {
      if (e.action.kind == ActionKind::message || e.action.kind == ActionKind::propose) {
        expected[e.action.sender] += word_count(e.action.text);
      }
    }
    EXPECT_EQ(s.words, expected);
  }
}

TEST(Termination, IsMonotone) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const TaskId task = static_cast<TaskId>(seed % 3);
    std::vector<std::unique_ptr<Agent>> agents;
    for (int a = 0; a < actor_count(task); ++a) {
      agents.push_back(std::make_unique<testing::ChattyAgent>(2, seed + a));
    }
    auto s = new_session(generate(task, seed));
    bool ended = false;
    while (!s.over()) {
      s = request_action(*agents[s.turn], s, s.turn).state;
      EXPECT_FALSE(ended);
      ended = s.terminal();
    }
    if (s.terminal()) {
      const auto& last = s.transcript.back().action;
      EXPECT_EQ(last.kind, ActionKind::accept);
      EXPECT_TRUE(is_full(*s.final_decision));
    }
  }
}

TEST(Actions, JsonRoundTrip) {
  const DialogueAction a{ActionKind::propose, 2, 0, "x", FlightChoice{{1, std::nullopt}}};
  EXPECT_EQ(action_from_json(action_to_json(a)), a);
  const DialogueAction m{ActionKind::message, 0, std::nullopt, "hi there", std::nullopt};
  EXPECT_EQ(action_from_json(action_to_json(m)), m);
  EXPECT_THROW(action_from_json(json{{"kind", "shout"}, {"sender", 0}}), Error);
}

}  // namespace
}  // namespace decdial

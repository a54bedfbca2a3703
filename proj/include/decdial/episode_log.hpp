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

// Episode logs: line-delimited JSON records, header first and footer last.
//
//   {"type":"header","format":"decdial-episode/1","task":..,"seed":..,
//    "params":{..},"roster":[{"role":..,"agent":..}],"turn_mode":..,"cap":..}
//   {"type":"event","index":..,"sender":..,"recipient":..,"kind":..,"text":..,
//    "proposal":..,"feedback":{role:text},"visible_to":[..],"auto":..}
//   {"type":"notice","before":..,"to":..,"text":..}
//   {"type":"footer","status":..,"failure":..,"raw":..,"normalized":..,
//    "best":..,"worst":..,"words":[..],"actions":..,"wall_clock_ms":..}
//
// Keys are emitted in sorted order and numbers in shortest round-trip form,
// so equal sessions serialize to equal bytes.

#ifndef DECDIAL_EPISODE_LOG_HPP_
#define DECDIAL_EPISODE_LOG_HPP_

#include <optional>
#include <string>
#include <vector>

#include "decdial/common.hpp"
#include "decdial/dialogue.hpp"
#include "decdial/worldgen.hpp"

namespace decdial {

inline constexpr const char* kLogFormat = "decdial-episode/1";

// A system line shown to one actor before event `before` is produced.
struct Notice {
  int before = 0;
  ActorId to = 0;
  std::string text;
  bool operator==(const Notice&) const = default;
};

struct EpisodeLog {
  json header;
  std::vector<json> events;
  std::vector<Notice> notices;
  json footer;  // null while the episode is still running

  TaskId task() const { return task_from_string(header.at("task").get<std::string>()); }
  std::uint64_t seed() const { return header.at("seed").get<std::uint64_t>(); }
};

inline std::string_view to_string(TurnMode m) { return m == TurnMode::strict ? "strict" : "free"; }

inline TurnMode turn_mode_from_string(std::string_view s) {
  if (s == "strict") return TurnMode::strict;
  if (s == "free") return TurnMode::free;
  throw SchemaError("unknown turn mode: " + std::string(s));
}

inline json log_header(const SessionState& s, const std::vector<std::string>& agents) {
  const auto roles = role_names(s.task());
  json roster = json::array();
  for (std::size_t i = 0; i < roles.size(); ++i) {
    roster.push_back({{"role", roles[i]}, {"agent", i < agents.size() ? agents[i] : "unknown"}});
  }
  return {{"type", "header"},
          {"format", kLogFormat},
          {"task", to_string(s.task())},
          {"seed", seed_of(s.world())},
          {"params", s.ctx->params},
          {"roster", roster},
          {"turn_mode", to_string(s.config.turn_mode)},
          {"cap", s.cap()}};
}

inline json log_event(const SessionState& s, const TranscriptEvent& e) {
  const auto roles = role_names(s.task());
  json j = action_to_json(e.action);
  j["type"] = "event";
  j["index"] = e.index;
  json fb = json::object();
  for (const auto& [actor, text] : e.feedback) fb[roles.at(actor)] = text;
  j["feedback"] = fb;
  j["visible_to"] = e.visible_to;
  j["auto"] = e.automatic;
  return j;
}

inline json log_notice(const Notice& n) {
  return {{"type", "notice"}, {"before", n.before}, {"to", n.to}, {"text", n.text}};
}

inline json log_footer(const SessionState& s, std::optional<double> wall_clock_ms = std::nullopt) {
  json j{{"type", "footer"},
         {"status", to_string(s.status)},
         {"failure", s.failure},
         {"best", s.ctx->range.best},
         {"worst", s.ctx->range.worst},
         {"words", s.words},
         {"actions", s.action_count()},
         {"raw", nullptr},
         {"normalized", nullptr}};
  if (const auto score = final_score(s)) {
    j["raw"] = score->raw;
    j["normalized"] = score->normalized;
  }
  j["wall_clock_ms"] = wall_clock_ms ? json(*wall_clock_ms) : json(nullptr);
  return j;
}

inline EpisodeLog make_log(const SessionState& s, const std::vector<std::string>& agents,
                           std::vector<Notice> notices = {},
                           std::optional<double> wall_clock_ms = std::nullopt) {
  EpisodeLog log;
  log.header = log_header(s, agents);
  for (const auto& e : s.transcript) log.events.push_back(log_event(s, e));
  log.notices = std::move(notices);
  log.footer = log_footer(s, wall_clock_ms);
  return log;
}

inline std::string serialize_log(const EpisodeLog& log) {
  std::string out = log.header.dump() + "\n";
  std::size_t n = 0;
  auto flush_notices = [&](std::size_t before) {
    for (; n < log.notices.size() && log.notices[n].before <= static_cast<int>(before); ++n) {
      out += log_notice(log.notices[n]).dump() + "\n";
    }
  };
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    flush_notices(i);
    out += log.events[i].dump() + "\n";
  }
  flush_notices(log.events.size());
  if (!log.footer.is_null()) out += log.footer.dump() + "\n";
  return out;
}

inline EpisodeLog parse_log(std::string_view text) {
  EpisodeLog log;
  int line_no = 0;
  for (const auto& line : split(text, "\n")) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError("log line " + std::to_string(line_no) + " is not JSON: " + e.what());
    }
    const std::string type = j.value("type", "");
    if (!log.footer.is_null()) throw SchemaError("records after the footer");
    if (type == "header") {
      if (!log.header.is_null()) throw SchemaError("duplicate log header");
      if (j.value("format", "") != kLogFormat) throw SchemaError("unknown log format");
      log.header = std::move(j);
      continue;
    }
    if (log.header.is_null()) throw SchemaError("log must start with a header");
    if (type == "event") {
      log.events.push_back(std::move(j));
    } else if (type == "notice") {
      log.notices.push_back(
          {j.at("before").get<int>(), j.at("to").get<ActorId>(), j.at("text").get<std::string>()});
    } else if (type == "footer") {
      log.footer = std::move(j);
    } else {
      throw SchemaError("unknown log record type on line " + std::to_string(line_no));
    }
  }
  if (log.header.is_null()) throw SchemaError("empty log");
  return log;
}

// Non-think actions per the message-count convention used for prefixes.
inline int message_count(const EpisodeLog& log) {
  int n = 0;
  for (const auto& e : log.events) n += e.at("kind") != "think";
  return n;
}

inline int total_words(const EpisodeLog& log) {
  int n = 0;
  for (const auto& e : log.events) {
    const std::string kind = e.at("kind");
    if (kind == "message" || kind == "propose") n += word_count(e.at("text").get<std::string>());
  }
  return n;
}

inline World log_world(const EpisodeLog& log) {
  return generate(log.task(), log.seed(), log.header.at("params"));
}

inline SessionConfig log_config(const EpisodeLog& log) {
  SessionConfig c;
  c.turn_mode = turn_mode_from_string(log.header.value("turn_mode", "strict"));
  c.max_actions = log.header.value("cap", 0);
  return c;
}

// Fresh session for the log's world.
inline SessionState log_session(const EpisodeLog& log) {
  return new_session(log_world(log), log_config(log), log.header.at("params"));
}

// Replays the first `limit` events (all when empty) through submit_action,
// checking each re-derived event against the recorded one.
inline SessionState replay(const EpisodeLog& log, const SessionState& start,
                           std::optional<std::size_t> limit = std::nullopt) {
  SessionState s = start;
  const std::size_t n = limit ? std::min(*limit, log.events.size()) : log.events.size();
  for (std::size_t i = 0; i < n; ++i) {
    const json& rec = log.events[i];
    DialogueAction a = action_from_json(rec);
    s = submit_action(s, a).state;
    s.transcript.back().automatic = rec.value("auto", false);
    if (log_event(s, s.transcript.back()) != rec) {
      throw SchemaError("replay diverged at event " + std::to_string(i));
    }
  }
  if (!limit && !log.footer.is_null()) {
    if (log.footer.value("status", "") == "failed" && !s.over()) {
      s = fail_session(s, log.footer.value("failure", ""));
    }
    json expected = log.footer;
    json actual = log_footer(s, std::nullopt);
    expected.erase("wall_clock_ms");
    actual.erase("wall_clock_ms");
    if (expected != actual) throw SchemaError("replay footer differs from the log");
  }
  return s;
}

inline SessionState replay(const EpisodeLog& log,
                           std::optional<std::size_t> limit = std::nullopt) {
  return replay(log, log_session(log), limit);
}

// Export view for free-turn sessions: strictly adjacent messages from the
// same sender to the same recipient merge into one logical turn.
inline json merged_turns(const EpisodeLog& log) {
  json out = json::array();
  for (const auto& e : log.events) {
    if (e.at("kind") == "think") continue;
    if (!out.empty() && e.at("kind") == "message" && out.back().at("kind") == "message" &&
        out.back().at("sender") == e.at("sender") &&
        out.back().at("recipient") == e.at("recipient")) {
      out.back()["text"] = out.back().at("text").get<std::string>() + "\n" +
                           e.at("text").get<std::string>();
      continue;
    }
    out.push_back({{"sender", e.at("sender")},
                   {"recipient", e.at("recipient")},
                   {"kind", e.at("kind")},
                   {"text", e.at("text")},
                   {"proposal", e.at("proposal")}});
  }
  return out;
}

}  // namespace decdial

#endif  // DECDIAL_EPISODE_LOG_HPP_

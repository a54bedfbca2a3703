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

// HTTP surface of the session service.
//
//   POST /sessions                   {task, seed?, params?, roles: [..], disclose_score?, claim?}
//   GET  /sessions
//   POST /sessions/{id}/join         {role}
//   GET  /sessions/{id}/view         token
//   GET  /sessions/{id}/log          token, once the session is over
//   POST /sessions/{id}/actions      token; {kind, text?, recipient?, proposal?}
//   GET  /sessions/{id}/frames       token; since=n, wait_ms=t (long poll)
//
// The token travels as "Authorization: Bearer <token>" or as ?token=.
// Errors are {"error": text} with a 4xx status; illegal actions use 422.

#ifndef DECDIAL_HTTP_SERVER_HPP_
#define DECDIAL_HTTP_SERVER_HPP_

#include <httplib.h>

#include <string>

#include "decdial/session_service.hpp"

namespace decdial {

inline constexpr int kMaxLongPollMs = 30000;

namespace detail {

inline std::string request_token(const httplib::Request& req) {
  const std::string auth = req.get_header_value("Authorization");
  const std::string prefix = "Bearer ";
  if (auth.rfind(prefix, 0) == 0) return auth.substr(prefix.size());
  return req.get_param_value("token");
}

inline void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline int int_param(const httplib::Request& req, const std::string& key, int fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return std::stoi(req.get_param_value(key));
  } catch (const std::exception&) {
    throw RequestError(400, "parameter " + key + " must be an integer");
  }
}

template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const RequestError& e) {
    send_json(res, {{"error", e.what()}}, e.status());
  } catch (const ActionError& e) {
    send_json(res, {{"error", e.what()}, {"retriable", true}}, 422);
  } catch (const Error& e) {
    send_json(res, {{"error", e.what()}}, 400);
  } catch (const json::exception& e) {
    send_json(res, {{"error", std::string("malformed request: ") + e.what()}}, 400);
  }
}

}  // namespace detail

// Registers the routes on `server`. `static_dir`, when set, is mounted at /.
inline void install_routes(httplib::Server& server, SessionService& service,
                           const std::string& static_dir = "") {
  using detail::guarded;
  using detail::send_json;

  server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = json::parse(req.body.empty() ? "{}" : req.body);
      const TaskId task = task_from_string(body.at("task").get<std::string>());
      std::optional<std::uint64_t> seed;
      if (body.contains("seed") && !body["seed"].is_null()) seed = body["seed"].get<std::uint64_t>();
      std::vector<std::string> wiring;
      if (body.contains("roles")) {
        wiring = body.at("roles").get<std::vector<std::string>>();
      } else {
        wiring.assign(actor_count(task), kHumanSeat);
      }
      SessionOptions options;
      options.disclose_final_score = body.value("disclose_score", true);
      options.claim_tickets = body.value("claim", true);
      options.cap = body.value("cap", 0);
      const auto created =
          service.create_session(task, seed, wiring, options, body.value("params", json::object()));
      json tickets = json::array();
      for (const auto& t : created.tickets) tickets.push_back(ticket_to_json(t));
      send_json(res, {{"session_id", created.session_id}, {"seed", created.seed},
                      {"tickets", tickets}}, 201);
    });
  });

  server.Get("/sessions", [&service](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, service.list_sessions()); });
  });

  server.Post(R"(/sessions/([0-9a-f]+)/join)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const json body = json::parse(req.body.empty() ? "{}" : req.body);
                  send_json(res, ticket_to_json(service.join(req.matches[1],
                                                             body.at("role").get<std::string>())));
                });
              });

  server.Get(R"(/sessions/([0-9a-f]+)/view)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 send_json(res, service.view(req.matches[1], detail::request_token(req)));
               });
             });

  server.Get(R"(/sessions/([0-9a-f]+)/log)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 res.set_content(service.log(req.matches[1], detail::request_token(req)),
                                 "application/x-ndjson");
               });
             });

  server.Post(R"(/sessions/([0-9a-f]+)/actions)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const json body = json::parse(req.body);
                  send_json(res, service.post_action(req.matches[1], detail::request_token(req),
                                                     body));
                });
              });

  server.Get(R"(/sessions/([0-9a-f]+)/frames)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const int since = detail::int_param(req, "since", 0);
                 const int wait = std::clamp(detail::int_param(req, "wait_ms", 0), 0, kMaxLongPollMs);
                 json frames = json::array();
                 for (const auto& f :
                      service.frames(req.matches[1], detail::request_token(req), since, wait)) {
                   frames.push_back(frame_to_json(f));
                 }
                 send_json(res, {{"frames", frames}});
               });
             });

  if (!static_dir.empty()) server.set_mount_point("/", static_dir);
}

}  // namespace decdial

#endif  // DECDIAL_HTTP_SERVER_HPP_

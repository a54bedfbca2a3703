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

// External agents over line-delimited JSON. Each request is one line; the
// agent answers with one line:
//
//   {"type":"reply","session":..,"turn":..,"kind":"propose","proposal":{..}}
//   {"type":"reply","session":..,"turn":..,"text":"[message] Hi","recipient":0}
//   {"type":"search","session":..,"turn":..,"query":"Search(fields=[name])"}
//
// Replies whose session or turn do not match the open request are stale and
// skipped. DECDIAL_BRIDGE_TIMEOUT_MS bounds the wait for each line.

#ifndef DECDIAL_BRIDGE_HPP_
#define DECDIAL_BRIDGE_HPP_

#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "decdial/agents.hpp"
#include "decdial/common.hpp"

namespace decdial {

inline constexpr int kDefaultBridgeTimeoutMs = 60000;

inline int bridge_timeout_ms() {
  if (const char* v = std::getenv("DECDIAL_BRIDGE_TIMEOUT_MS")) {
    char* end = nullptr;
    const long ms = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && ms > 0) return static_cast<int>(ms);
  }
  return kDefaultBridgeTimeoutMs;
}

class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void send(const std::string& line) = 0;
  // Next line without its newline; TransportError on timeout or close.
  virtual std::string receive(int timeout_ms) = 0;
};

// A child process spoken to over its stdin and stdout.
class ProcessChannel : public LineChannel {
 public:
  explicit ProcessChannel(const std::string& command) {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) throw TransportError("pipe failed");
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      throw TransportError("pipe failed");
    }
    pid_ = fork();
    if (pid_ < 0) throw TransportError("fork failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
    signal(SIGPIPE, SIG_IGN);
  }

  ProcessChannel(const ProcessChannel&) = delete;
  ProcessChannel& operator=(const ProcessChannel&) = delete;

  ~ProcessChannel() override {
    if (in_ >= 0) close(in_);
    if (out_ >= 0) close(out_);
    if (pid_ > 0) {
      int status = 0;
      if (waitpid(pid_, &status, WNOHANG) == 0) {
        kill(pid_, SIGTERM);
        waitpid(pid_, &status, 0);
      }
    }
  }

  void send(const std::string& line) override {
    const std::string data = line + "\n";
    std::size_t done = 0;
    while (done < data.size()) {
      const ssize_t n = write(in_, data.data() + done, data.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError("agent process closed its input");
      }
      done += static_cast<std::size_t>(n);
    }
  }

  std::string receive(int timeout_ms) override {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                            deadline - std::chrono::steady_clock::now())
                            .count();
      if (left <= 0) throw TransportError("agent reply timed out");
      pollfd p{out_, POLLIN, 0};
      const int r = poll(&p, 1, static_cast<int>(left));
      if (r < 0 && errno == EINTR) continue;
      if (r <= 0) throw TransportError("agent reply timed out");
      char chunk[4096];
      const ssize_t n = read(out_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw TransportError("agent process closed its output");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::string buffer_;
};

// Decodes one reply line for `req`. Returns nullopt for stale replies.
// Undecodable lines become an empty free-text reply, which the revision
// loop rejects with an error the agent sees on its next attempt.
inline std::optional<AgentReply> decode_reply(const ActionRequest& req, const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception&) {
    AgentReply r;
    r.raw_text = line;
    return r;
  }
  if (!j.is_object()) return AgentReply{};
  if (j.contains("session") && j["session"] != req.session_id) return std::nullopt;
  if (j.contains("turn") && j["turn"] != req.turn) return std::nullopt;
  AgentReply r;
  try {
    if (j.value("type", "reply") == "search") {
      r.search = j.at("query").get<std::string>();
      return r;
    }
    if (j.contains("recipient") && !j["recipient"].is_null()) {
      r.recipient = j["recipient"].get<ActorId>();
    }
    if (j.contains("kind")) {
      json a = j;
      if (!a.contains("sender")) a["sender"] = req.role;
      r.action = action_from_json(a);
    } else {
      r.raw_text = j.value("text", "");
    }
  } catch (const std::exception&) {
    r = AgentReply{};
  }
  return r;
}

class ExternalAgent : public Agent {
 public:
  ExternalAgent(std::unique_ptr<LineChannel> channel, std::string name)
      : channel_(std::move(channel)), name_(std::move(name)) {}
  std::string name() const override { return name_; }

  AgentReply act(const ActionRequest& req) override {
    channel_->send(request_to_json(req).dump());
    const int timeout = bridge_timeout_ms();
    for (;;) {
      if (auto r = decode_reply(req, channel_->receive(timeout))) return *r;
    }
  }

 private:
  std::unique_ptr<LineChannel> channel_;
  std::string name_;
};

// Agent endpoints: "random", "oracle" or "exec:<shell command>".
inline std::unique_ptr<Agent> make_agent(const std::string& endpoint, std::uint64_t seed) {
  if (endpoint == "random") return std::make_unique<RandomAgent>(seed);
  if (endpoint == "oracle") return std::make_unique<OracleAgent>();
  if (endpoint.rfind("exec:", 0) == 0) {
    return std::make_unique<ExternalAgent>(std::make_unique<ProcessChannel>(endpoint.substr(5)),
                                           endpoint);
  }
  throw DomainError("unknown agent endpoint: " + endpoint);
}

}  // namespace decdial

#endif  // DECDIAL_BRIDGE_HPP_

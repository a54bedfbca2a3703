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

#ifndef DECDIAL_COMMON_HPP_
#define DECDIAL_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace decdial {

using json = nlohmann::json;

// Index of a participant in a session roster.
using ActorId = int;

enum class TaskId { optimization, planning, mediation };

inline std::string_view to_string(TaskId task) {
  switch (task) {
    case TaskId::optimization: return "optimization";
    case TaskId::planning: return "planning";
    case TaskId::mediation: return "mediation";
  }
  return "unknown";
}

// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or reference to something that does not exist.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A proposal or document does not follow its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// An action was refused by the session. The message is meant to be shown to
// the acting agent so that it can revise its output.
class ActionError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, std::uint64_t seed)
      : Error(what + " (seed " + std::to_string(seed) + ")"), seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// A decision was finalized while some part of it is still missing.
class IncompleteDecisionError : public Error {
 public:
  using Error::Error;
};

// Requested computation is outside what the implementation supports.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// An agent exhausted its retry budget without producing a legal action.
class ProtocolFailure : public Error {
 public:
  using Error::Error;
};

// Communication with an external agent failed. Retriable.
class TransportError : public Error {
 public:
  using Error::Error;
};

inline TaskId task_from_string(std::string_view name) {
  if (name == "optimization" || name == "matching") return TaskId::optimization;
  if (name == "planning") return TaskId::planning;
  if (name == "mediation") return TaskId::mediation;
  throw DomainError("unknown task: " + std::string(name));
}

// Rounds half away from zero and never yields negative zero.
inline long long display_round(double value) {
  const double r = std::round(value);
  return r == 0.0 ? 0 : static_cast<long long>(r);
}

// "+4", "-8", "+0".
inline std::string signed_term(long long value) {
  return (value < 0 ? "-" : "+") + std::to_string(value < 0 ? -value : value);
}

// Shortest "%g"-style rendering used for feature values such as ratings:
// 3 -> "3", 2.5 -> "2.5".
inline std::string format_number(double value) {
  if (value == std::floor(value) && std::fabs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

// Fixed one-decimal rendering, e.g. 0 -> "0.0", 1.25 -> "1.3".
inline std::string format_tenths(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", std::round(value * 10.0) / 10.0);
  std::string s = buf;
  if (s == "-0.0") s = "0.0";
  return s;
}

inline std::string trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return std::string(s.substr(begin, end - begin));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, std::string_view sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      return parts;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + sep.size();
  }
}

inline std::string join(const std::vector<std::string>& parts,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace decdial

#endif  // DECDIAL_COMMON_HPP_

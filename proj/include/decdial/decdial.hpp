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

// Umbrella header. The HTTP layer is separate: include
// decdial/http_server.hpp where a server is wanted.

#ifndef DECDIAL_DECDIAL_HPP_
#define DECDIAL_DECDIAL_HPP_

#include "decdial/agents.hpp"
#include "decdial/bridge.hpp"
#include "decdial/common.hpp"
#include "decdial/data.hpp"
#include "decdial/decisions.hpp"
#include "decdial/dialogue.hpp"
#include "decdial/episode_log.hpp"
#include "decdial/harness.hpp"
#include "decdial/proposals.hpp"
#include "decdial/query.hpp"
#include "decdial/reward.hpp"
#include "decdial/rng.hpp"
#include "decdial/scoring.hpp"
#include "decdial/session_service.hpp"
#include "decdial/solvers.hpp"
#include "decdial/views.hpp"
#include "decdial/worldgen.hpp"
#include "decdial/worlds.hpp"

#endif  // DECDIAL_DECDIAL_HPP_

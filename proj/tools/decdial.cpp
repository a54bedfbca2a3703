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

// Command-line driver: generate, selfplay, psp, score, stats, serve.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "decdial/decdial.hpp"
#include "decdial/http_server.hpp"

namespace fs = std::filesystem;
using decdial::json;

namespace {

// "0-199", "3,5,8" or a mix such as "0-9,20".
std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> out;
  for (const auto& part : decdial::split(spec, ",")) {
    const std::string p = decdial::trim(part);
    if (p.empty()) continue;
    const auto dash = p.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoull(p));
      } else {
        const auto lo = std::stoull(p.substr(0, dash));
        const auto hi = std::stoull(p.substr(dash + 1));
        if (hi < lo) throw decdial::DomainError("empty seed range: " + p);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw decdial::DomainError("bad seed list: " + spec);
    }
  }
  if (out.empty()) throw decdial::DomainError("no seeds given");
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw decdial::DomainError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw decdial::DomainError("cannot write " + path.string());
  out << text;
}

json parse_json_arg(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw decdial::SchemaError(what + " is not valid JSON: " + e.what());
  }
}

std::vector<fs::path> collect_logs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.path().extension() == ".jsonl") out.push_back(e.path());
      }
    } else {
      out.emplace_back(in);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_run(const std::vector<decdial::EpisodeResult>& rows, const std::string& out_dir,
               const std::string& stem) {
  const auto summary = decdial::summarize(rows);
  const json doc = decdial::summary_json(summary, rows);
  if (!out_dir.empty()) {
    for (const auto& r : rows) {
      if (r.log.empty()) continue;
      write_file(fs::path(out_dir) / (stem + "-" + std::to_string(r.seed) + ".jsonl"), r.log);
    }
    write_file(fs::path(out_dir) / "summary.json", doc.dump(2) + "\n");
  }
  std::cout << "episodes " << summary.total << "  terminated " << summary.terminated
            << "  capped " << summary.capped << "  failed " << summary.failed << "\n";
  if (summary.score.n > 0) {
    std::cout << "score " << summary.score.mean << " +- " << summary.score.sem << "  words "
              << summary.words.mean << " +- " << summary.words.sem << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-oriented dialogue environments"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate world documents");
  std::string gen_task;
  std::string gen_seeds = "0";
  std::string gen_params = "{}";
  std::string gen_view;
  std::string gen_out;
  gen->add_option("--task", gen_task, "optimization, planning or mediation")->required();
  gen->add_option("--seeds", gen_seeds, "Seed list, e.g. 0-9,20");
  gen->add_option("--params", gen_params, "Generation parameters as JSON");
  gen->add_option("--view", gen_view, "Print this role's observation instead of the world");
  gen->add_option("--out", gen_out, "Write line-delimited documents to this file");

  // selfplay
  auto* sp = app.add_subcommand("selfplay", "Run self-play episodes");
  std::string sp_task;
  std::string sp_seeds = "0-19";
  std::string sp_params = "{}";
  std::vector<std::string> sp_agents{"random"};
  std::string sp_out;
  int sp_cap = 0;
  int sp_workers = 1;
  int sp_retries = decdial::kDefaultRetryBudget;
  sp->add_option("--task", sp_task)->required();
  sp->add_option("--seeds", sp_seeds, "Seed list, e.g. 0-199");
  sp->add_option("--params", sp_params, "Generation parameters as JSON");
  sp->add_option("--agents", sp_agents, "Endpoint per role: random, oracle or exec:<command>")
      ->delimiter(',');
  sp->add_option("--out", sp_out, "Directory for episode logs and summary.json");
  sp->add_option("--cap", sp_cap, "Action cap (0 selects the task default)");
  sp->add_option("--workers", sp_workers, "Episodes run in parallel");
  sp->add_option("--retries", sp_retries, "Attempts per turn before an episode fails")
      ->check(CLI::PositiveNumber);

  // psp
  auto* psp = app.add_subcommand("psp", "Continue logged dialogues with agents");
  std::vector<std::string> psp_prefix;
  std::string psp_mode = "psp-50";
  std::vector<std::string> psp_agents{"random"};
  std::string psp_out;
  int psp_retries = decdial::kDefaultRetryBudget;
  psp->add_option("--prefix", psp_prefix, "Source episode logs or directories")->required();
  psp->add_option("--mode", psp_mode, "psp-50, psp-75 or psp-proposal");
  psp->add_option("--agents", psp_agents, "Endpoint per role")->delimiter(',');
  psp->add_option("--out", psp_out, "Directory for episode logs and summary.json");
  psp->add_option("--retries", psp_retries)->check(CLI::PositiveNumber);

  // score
  auto* sc = app.add_subcommand("score", "Score a decision or re-score a log");
  std::string sc_world;
  std::string sc_task;
  std::uint64_t sc_seed = 0;
  std::string sc_params = "{}";
  std::string sc_proposal;
  std::string sc_log;
  sc->add_option("--world", sc_world, "World document file");
  sc->add_option("--task", sc_task);
  sc->add_option("--seed", sc_seed);
  sc->add_option("--params", sc_params);
  sc->add_option("--proposal", sc_proposal,
                 R"(Decision as JSON: {"assignment":[..]}, {"slots":[..]} or {"flights":[..]})");
  sc->add_option("--log", sc_log, "Replay a log and print its final score");

  // stats
  auto* st = app.add_subcommand("stats", "Summarize episode logs");
  std::vector<std::string> st_inputs;
  st->add_option("logs", st_inputs, "Episode logs or directories")->required();

  // serve
  auto* sv = app.add_subcommand("serve", "Run the session service");
  std::string sv_host = "127.0.0.1";
  int sv_port = 8080;
  std::string sv_static;
  sv->add_option("--host", sv_host);
  sv->add_option("--port", sv_port);
  sv->add_option("--static", sv_static, "Directory of UI assets mounted at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto task = decdial::task_from_string(gen_task);
      const json params = parse_json_arg(gen_params, "--params");
      std::string out;
      for (auto seed : parse_seeds(gen_seeds)) {
        const auto world = decdial::generate(task, seed, params);
        if (!gen_view.empty()) {
          out += decdial::render_observation(world, decdial::role_from_name(task, gen_view));
        } else {
          out += decdial::world_to_json(world).dump() + "\n";
        }
      }
      if (gen_out.empty()) {
        std::cout << out;
      } else {
        write_file(gen_out, out);
      }
    } else if (*sp) {
      decdial::RunConfig config;
      config.task = decdial::task_from_string(sp_task);
      config.seeds = parse_seeds(sp_seeds);
      config.params = parse_json_arg(sp_params, "--params");
      config.endpoints = sp_agents;
      config.cap = sp_cap;
      config.workers = sp_workers;
      config.retry_budget = sp_retries;
      write_run(decdial::run_selfplay(config), sp_out, std::string(decdial::to_string(config.task)));
    } else if (*psp) {
      const auto mode = decdial::run_mode_from_string(psp_mode);
      if (mode == decdial::RunMode::selfplay) throw decdial::DomainError("--mode must be a psp mode");
      const auto factory = decdial::endpoint_factory(psp_agents);
      std::vector<decdial::EpisodeResult> rows;
      for (const auto& path : collect_logs(psp_prefix)) {
        rows.push_back(
            decdial::run_psp(decdial::parse_log(read_file(path)), mode, factory, psp_retries));
      }
      write_run(rows, psp_out, psp_mode);
    } else if (*sc) {
      if (!sc_log.empty()) {
        const auto log = decdial::parse_log(read_file(sc_log));
        const auto s = decdial::replay(log);
        json out{{"status", decdial::to_string(s.status)}};
        if (const auto score = decdial::final_score(s)) {
          out.update({{"raw", score->raw}, {"normalized", score->normalized},
                      {"best", score->best}, {"worst", score->worst}});
        }
        std::cout << out.dump() << "\n";
      } else {
        const decdial::World world =
            !sc_world.empty()
                ? decdial::world_from_json(parse_json_arg(read_file(sc_world), "--world"))
                : decdial::generate(decdial::task_from_string(sc_task), sc_seed,
                                    parse_json_arg(sc_params, "--params"));
        if (sc_proposal.empty()) throw decdial::DomainError("--proposal is required");
        const auto payload = decdial::payload_from_json(parse_json_arg(sc_proposal, "--proposal"));
        const auto score = decdial::score_decision(world, payload);
        std::cout << json{{"raw", score.raw}, {"normalized", score.normalized},
                          {"best", score.best}, {"worst", score.worst}}
                         .dump()
                  << "\n";
      }
    } else if (*st) {
      std::vector<decdial::EpisodeResult> rows;
      for (const auto& path : collect_logs(st_inputs)) {
        rows.push_back(decdial::result_from_log(decdial::parse_log(read_file(path))));
      }
      const auto summary = decdial::summarize(rows);
      std::cout << decdial::summary_json(summary, rows).dump(2) << "\n";
    } else if (*sv) {
      decdial::SessionService service;
      httplib::Server server;
      decdial::install_routes(server, service, sv_static);
      std::cerr << "listening on " << sv_host << ":" << sv_port << "\n";
      if (!server.listen(sv_host, sv_port)) {
        std::cerr << "decdial: cannot bind " << sv_host << ":" << sv_port << "\n";
        return 1;
      }
    }
  } catch (const decdial::Error& e) {
    std::cerr << "decdial: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "decdial: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

// Copyright 2026 The xrzone Authors
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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrzone/http_provider.hpp"
#include "xrzone/instance_gen.hpp"
#include "xrzone/wire.hpp"

namespace xrzone::cli {

/// Unreadable, unwritable or invalid input; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw InputError("cannot write '" + path.string() + "'");
}

struct Options {
  std::optional<std::string> engine;
  std::optional<std::uint64_t> seed;
  std::string config_path;
  bool timing = false;
  std::ostream* verbose = nullptr;
};

struct Loaded {
  Scenario scenario;
  EngineConfig config;
  std::shared_ptr<LanguageModelProvider> provider;
};

inline void say(const Options& opt, const std::string& line) {
  if (opt.verbose) *opt.verbose << "[xrzone] " << line << "\n";
}

/// Reads the scenario, overlays config and environment, loads telemetry and
/// picks the provider. The provider serves relevance for every engine; only
/// "mock" and "llm" also use it for Stage 1.
inline Loaded load(const std::filesystem::path& path, const Options& opt) {
  Loaded out;
  const std::filesystem::path dir = path.parent_path();
  try {
    out.scenario = scenario_from_json(expect_envelope(read_file(path), "scenario").body);
    if (opt.engine) out.scenario.engine = *opt.engine;
    if (opt.seed) out.scenario.seed = *opt.seed;
    if (out.scenario.engine != "mock") engine_from_string(out.scenario.engine);
    out.config = config_from_json(out.scenario.config, "config");
    if (!opt.config_path.empty()) {
      const Json c = parse_json(read_file(opt.config_path));
      out.config = config_from_json(c.contains("body") ? c["body"] : c, "config", out.config);
    }
    apply_environment(out.config);
    out.config.planner.engine = out.scenario.engine == "mock" ? Engine::kLlm
                                                              : engine_from_string(out.scenario.engine);
    if (!out.scenario.telemetry.empty()) {
      const auto events = events_from_ndjson(read_file(dir / out.scenario.telemetry));
      out.scenario.workspace = ingest_events(out.scenario.workspace, events);
      say(opt, "telemetry: " + std::to_string(events.size()) + " events");
    }
  } catch (const Error& e) {
    throw InputError(path.string() + ": " + e.what());
  }

  const ProviderSettings& ps = out.config.provider;
  if (out.scenario.engine == "llm") {
    if (ps.endpoint.empty()) throw InputError("engine llm requires provider.endpoint or XRZONE_PROVIDER_ENDPOINT");
    out.provider = std::make_shared<HttpProvider>(ps);
  } else if (!out.config.mock_fixtures.empty()) {
    out.provider = MockProvider::from_file((dir / out.config.mock_fixtures).string());
  } else if (out.scenario.engine == "mock") {
    out.provider = std::make_shared<MockProvider>();
  } else if (!ps.endpoint.empty()) {
    out.provider = std::make_shared<HttpProvider>(ps);
  }
  say(opt, "engine " + out.scenario.engine + ", provider " + (out.provider ? out.provider->name() : "none"));
  return out;
}

/// Relevance, Stage 1, Stage 2, then accept-all.
inline Report run(const Loaded& in, const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  WorkspaceState state = in.scenario.workspace;
  const std::string id = "proposal-" + std::to_string(state.proposal_seq + 1);
  Proposal proposal = plan_recommendation(state, in.scenario.goal, in.scenario.catalog,
                                          in.config.planner, in.provider.get(), id);
  say(opt, "proposal " + proposal.id + ": " + std::to_string(proposal.assignment.entries.size()) +
               " entries, cost " + format_number(proposal.total_cost) +
               (proposal.fallback() ? " (fallback)" : ""));
  for (const std::string& w : proposal.warnings) say(opt, "warning: " + w);
  state.pending = proposal;
  state.proposal_seq += 1;
  Resolution res = resolve_proposal(state, accept_all(proposal));
  say(opt, "accepted " + std::to_string(res.record.apps_accepted) + ", layouts adjusted " +
               std::to_string(res.record.layouts_adjusted));

  Report r;
  r.scenario = in.scenario.name;
  r.engine = in.scenario.engine;
  r.seed = in.scenario.seed;
  r.proposal = std::move(proposal);
  r.acceptance = std::move(res.record);
  r.workspace = std::move(res.state);
  if (opt.timing)
    r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

enum class Format { kText, kJson, kCsv };

inline Format format_from_string(const std::string& s) {
  if (s == "text") return Format::kText;
  if (s == "json") return Format::kJson;
  if (s == "csv") return Format::kCsv;
  throw InputError("unknown format '" + s + "'");
}

inline std::string cell_label(const CellRef& c) { return c.zone + "#" + std::to_string(c.cell); }

inline std::string render(const Report& r, Format f) {
  if (f == Format::kJson) return wrap("report", to_json(r), r.scenario);
  std::ostringstream out;
  if (f == Format::kCsv) {
    out << "metric,value\n";
    out << "total_cost," << format_number(r.proposal.total_cost) << "\n";
    out << "fallback," << (r.proposal.fallback() ? "true" : "false") << "\n";
    for (const SizingResult& s : r.proposal.sizing) {
      out << "zone." << s.zone_id << ".w0," << format_number(s.theta_star.w0) << "\n";
      out << "zone." << s.zone_id << ".h0," << format_number(s.theta_star.h0) << "\n";
      out << "zone." << s.zone_id << ".scale," << format_number(s.scale_factor) << "\n";
    }
    for (const AssignmentEntry& e : r.proposal.assignment.entries)
      out << "assign." << e.app << "," << cell_label(e.cell) << "\n";
    if (r.wall_time_ms) out << "wall_time_ms," << format_number(*r.wall_time_ms) << "\n";
    return out.str();
  }
  out << "scenario    " << r.scenario << "\n";
  out << "engine      " << r.engine << (r.proposal.fallback() ? " (fallback)" : "") << "\n";
  out << "goal        " << r.proposal.goal.text << "\n";
  out << "total cost  " << format_number(r.proposal.total_cost) << "\n";
  out << "assignment\n";
  for (const AssignmentEntry& e : r.proposal.assignment.entries) {
    const std::optional<double> rel = r.proposal.relevance.find(e.app);
    out << "  " << e.app << " -> " << cell_label(e.cell) << "  r=" << format_number(rel.value_or(1.0)) << "\n";
  }
  for (const std::string& u : r.proposal.assignment.unassigned) out << "  " << u << " -> (no free cell)\n";
  out << "sizing\n";
  for (const SizingResult& s : r.proposal.sizing)
    out << "  " << s.zone_id << "  w0=" << format_number(s.theta_star.w0)
        << " h0=" << format_number(s.theta_star.h0) << " scale=" << format_number(s.scale_factor)
        << (s.scale_clamped ? " (clamped)" : "") << "\n";
  out << "accepted    " << r.acceptance.apps_accepted << ", layouts adjusted "
      << r.acceptance.layouts_adjusted << "\n";
  if (r.wall_time_ms) out << "wall time   " << format_number(*r.wall_time_ms) << " ms\n";
  return out.str();
}

// ---- compare -----------------------------------------------------------------

struct CompareRow {
  std::string engine;
  double mean_cost = 0.0;
  double mean_regret = 0.0;
  double max_regret = 0.0;
  std::optional<double> runtime_ms;
};

struct CompareTable {
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<CompareRow> rows;
};

/// Engines on random instances, regret against the exhaustive optimum.
/// The scenario contributes weights, smoothing and the provider.
inline CompareTable compare(const Loaded& in, const std::vector<std::string>& engines, int trials,
                            std::uint64_t seed, const Options& opt) {
  if (trials < 0) throw InputError("trials must be >= 0");
  CompareTable table;
  table.trials = trials;
  table.seed = seed;
  if (trials == 0) return table;
  for (const std::string& e : engines)
    if (e != "mock") engine_from_string(e);

  struct Acc {
    double cost = 0.0, regret = 0.0, max_regret = 0.0, ms = 0.0;
  };
  std::vector<Acc> acc(engines.size());
  const PlannerConfig& pc = in.config.planner;
  for (int t = 0; t < trials; ++t) {
    const Instance inst = random_instance(seed + static_cast<std::uint64_t>(t));
    const AssignmentProblem pb = make_problem(inst, pc.weights, 1.0, pc.smoothing);
    const double best = total_cost(exhaustive_assign(pb, pc.oracle_budget), pb);
    for (std::size_t k = 0; k < engines.size(); ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      Assignment a;
      if (engines[k] == "greedy") {
        a = greedy_assign(pb);
      } else if (engines[k] == "oracle") {
        a = exhaustive_assign(pb, pc.oracle_budget);
      } else if (in.provider) {
        const Json payload = stage1_payload(pb, inst.state.zones, ReadabilityConfig::from_catalog(inst.catalog),
                                            inst.relevance.goal);
        a = llm_assign(payload, *in.provider, pb, pc.recommender).assignment;
      } else {
        a = greedy_assign(pb);
      }
      acc[k].ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      const double c = total_cost(a, pb);
      acc[k].cost += c;
      acc[k].regret += c - best;
      acc[k].max_regret = std::max(acc[k].max_regret, c - best);
    }
    say(opt, "trial " + std::to_string(t) + " done");
  }
  for (std::size_t k = 0; k < engines.size(); ++k) {
    CompareRow row{engines[k], acc[k].cost / trials, acc[k].regret / trials, acc[k].max_regret, std::nullopt};
    if (opt.timing) row.runtime_ms = acc[k].ms / trials;
    table.rows.push_back(row);
  }
  return table;
}

inline Json to_json(const CompareTable& t) {
  Json rows = Json::array();
  for (const CompareRow& r : t.rows) {
    Json row{{"engine", r.engine}, {"mean_cost", r.mean_cost}, {"mean_regret", r.mean_regret},
             {"max_regret", r.max_regret}};
    row["runtime_ms"] = r.runtime_ms ? Json(*r.runtime_ms) : Json(nullptr);
    rows.push_back(std::move(row));
  }
  return Json{{"trials", t.trials}, {"seed", t.seed}, {"rows", std::move(rows)}};
}

inline std::string render(const CompareTable& t, Format f) {
  if (f == Format::kJson) return wrap("compare_table", to_json(t));
  std::ostringstream out;
  const bool timed = !t.rows.empty() && t.rows.front().runtime_ms.has_value();
  if (f == Format::kCsv) {
    out << "engine,mean_cost,mean_regret,max_regret" << (timed ? ",runtime_ms" : "") << "\n";
    for (const CompareRow& r : t.rows) {
      out << r.engine << "," << format_number(r.mean_cost) << "," << format_number(r.mean_regret) << ","
          << format_number(r.max_regret);
      if (timed) out << "," << format_number(*r.runtime_ms);
      out << "\n";
    }
    return out.str();
  }
  out << "trials " << t.trials << ", seed " << t.seed << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %14s %14s %14s%s\n", "engine", "mean_cost", "mean_regret",
                "max_regret", timed ? "     runtime_ms" : "");
  out << line;
  for (const CompareRow& r : t.rows) {
    std::snprintf(line, sizeof line, "%-8s %14s %14s %14s", r.engine.c_str(), format_number(r.mean_cost).c_str(),
                  format_number(r.mean_regret).c_str(), format_number(r.max_regret).c_str());
    out << line;
    if (timed) {
      std::snprintf(line, sizeof line, " %14s", format_number(*r.runtime_ms).c_str());
      out << line;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace xrzone::cli

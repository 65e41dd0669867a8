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

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "xrzone/json.hpp"
#include "xrzone/workspace.hpp"

namespace xrzone {

inline constexpr const char* kSchemaVersion = "1";

// ---- envelope -----------------------------------------------------------------

inline const std::vector<std::string>& document_kinds() {
  static const std::vector<std::string> kinds = {
      "workspace_state", "proposal",  "sizing_result", "acceptance_record", "decisions",
      "report",          "scenario",  "config",        "event_batch",       "op",
      "recommend",       "error",     "session",       "compare_table",
      "resolution",      "op_result"};
  return kinds;
}

struct Envelope {
  std::string schema_version = kSchemaVersion;
  std::string request_id;
  std::string kind;
  Json body = Json::object();
};

inline Json to_json(const Envelope& e) {
  return Json{{"schema_version", e.schema_version},
              {"request_id", e.request_id},
              {"kind", e.kind},
              {"body", e.body}};
}

inline Envelope envelope_from_json(const Json& j) {
  Envelope e;
  e.schema_version = string_at(j, "schema_version");
  if (e.schema_version != kSchemaVersion)
    throw Error(ErrorCode::kInvalidDocument,
                "field 'schema_version': unsupported '" + e.schema_version + "'");
  e.request_id = optional_field(j, "request_id") ? string_at(j, "request_id") : "";
  e.kind = string_at(j, "kind");
  const auto& kinds = document_kinds();
  if (std::find(kinds.begin(), kinds.end(), e.kind) == kinds.end())
    throw Error(ErrorCode::kInvalidDocument, "field 'kind': unknown '" + e.kind + "'");
  e.body = require(j, "body");
  return e;
}

/// Parses an envelope and checks it carries `kind`.
inline Envelope expect_envelope(std::string_view text, std::string_view kind) {
  Envelope e = envelope_from_json(parse_json(text));
  if (e.kind != kind)
    throw Error(ErrorCode::kInvalidDocument,
                "field 'kind': expected '" + std::string(kind) + "', got '" + e.kind + "'");
  return e;
}

inline std::string wrap(std::string kind, Json body, std::string request_id = {}) {
  return canonical_dump(to_json(Envelope{kSchemaVersion, std::move(request_id), std::move(kind),
                                         std::move(body)}));
}

// ---- small helpers ----------------------------------------------------------

inline std::vector<std::string> strings_at(const Json& j, const std::string& key,
                                           const std::string& path) {
  std::vector<std::string> out;
  const Json& a = array_at(j, key, path);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_string())
      throw Error(ErrorCode::kInvalidDocument,
                  "field '" + index_path(field_path(path, key), i) + "': expected string");
    out.push_back(a[i].get<std::string>());
  }
  return out;
}

inline CellRef cellref_from_json(const Json& j, const std::string& path) {
  return {string_at(j, "zone", path), static_cast<int>(integer_at(j, "cell", path))};
}

inline std::uint64_t revision_at(const Json& j, const std::string& key, const std::string& path) {
  const long long v = integer_at(j, key, path);
  if (v < 0) throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, key) + "': negative");
  return static_cast<std::uint64_t>(v);
}

// ---- sizing / proposals ---------------------------------------------------------

inline Json to_json(const SizingResult& r) {
  return Json{{"zone", r.zone_id},
              {"theta_star", to_json(r.theta_star)},
              {"scale_factor", r.scale_factor},
              {"objective_value", r.objective_value},
              {"evaluated_points", r.evaluated_points},
              {"scale_clamped", r.scale_clamped},
              {"violations", r.violations}};
}

inline SizingResult sizing_from_json(const Json& j, const std::string& path) {
  SizingResult r;
  r.zone_id = string_at(j, "zone", path);
  r.theta_star = theta_from_json(require(j, "theta_star", path), field_path(path, "theta_star"));
  r.scale_factor = number_at(j, "scale_factor", path);
  if (!(r.scale_factor > 0.0))
    throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, "scale_factor") + "': must be > 0");
  r.objective_value = number_at(j, "objective_value", path);
  r.evaluated_points = static_cast<std::size_t>(integer_at(j, "evaluated_points", path));
  r.scale_clamped = bool_at(j, "scale_clamped", path);
  r.violations = strings_at(j, "violations", path);
  return r;
}

inline Json to_json(const OcclusionConflict& c) {
  return Json{{"zone", c.zone_id}, {"occlusion", c.occlusion_id}};
}

inline Json to_json(const Proposal& p) {
  Json sizing = Json::array();
  for (const SizingResult& r : p.sizing) sizing.push_back(to_json(r));
  Json conflicts = Json::array();
  for (const OcclusionConflict& c : p.conflicts) conflicts.push_back(to_json(c));
  return Json{{"id", p.id},
              {"status", std::string(to_string(p.status))},
              {"goal", to_json(p.goal)},
              {"base_revision", p.base_revision},
              {"engine", p.engine},
              {"relevance", to_json(p.relevance)},
              {"assignment", to_json(p.assignment)},
              {"sizing", std::move(sizing)},
              {"conflicts", std::move(conflicts)},
              {"total_cost", p.total_cost},
              {"fallback", p.fallback()},
              {"relevance_fallback", p.relevance_fallback},
              {"assignment_fallback", p.assignment_fallback},
              {"warnings", p.warnings},
              {"error", p.error}};
}

inline Proposal proposal_from_json(const Json& j, const std::string& path) {
  Proposal p;
  p.id = string_at(j, "id", path);
  const std::string status = string_at(j, "status", path);
  if (status == "pending") p.status = ProposalStatus::kPending;
  else if (status == "ready") p.status = ProposalStatus::kReady;
  else if (status == "failed") p.status = ProposalStatus::kFailed;
  else throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, "status") + "': unknown");
  p.goal = goal_from_json(require(j, "goal", path), field_path(path, "goal"));
  p.base_revision = revision_at(j, "base_revision", path);
  p.engine = string_at(j, "engine", path);
  p.relevance = relevance_from_json(require(j, "relevance", path), field_path(path, "relevance"));
  p.assignment = assignment_from_json(require(j, "assignment", path), field_path(path, "assignment"));
  const Json& sizing = array_at(j, "sizing", path);
  for (std::size_t i = 0; i < sizing.size(); ++i)
    p.sizing.push_back(sizing_from_json(sizing[i], index_path(field_path(path, "sizing"), i)));
  const Json& conflicts = array_at(j, "conflicts", path);
  for (std::size_t i = 0; i < conflicts.size(); ++i) {
    const std::string cp = index_path(field_path(path, "conflicts"), i);
    p.conflicts.push_back({string_at(conflicts[i], "zone", cp), string_at(conflicts[i], "occlusion", cp)});
  }
  p.total_cost = number_at(j, "total_cost", path);
  p.relevance_fallback = bool_at(j, "relevance_fallback", path);
  p.assignment_fallback = bool_at(j, "assignment_fallback", path);
  if (bool_at(j, "fallback", path) != p.fallback())
    throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, "fallback") + "': inconsistent");
  p.warnings = strings_at(j, "warnings", path);
  p.error = string_at(j, "error", path);
  return p;
}

// ---- workspace state -------------------------------------------------------------

inline Json to_json(const FreePose& f) {
  return Json{{"position", to_json(f.position)},
              {"orientation", to_json(f.orientation)},
              {"width", f.width},
              {"height", f.height}};
}

inline FreePose free_pose_from_json(const Json& j, const std::string& path, const UserPose& pose) {
  FreePose f;
  f.position = vec3_from_json(require(j, "position", path), field_path(path, "position"));
  if (const Json* o = optional_field(j, "orientation"))
    f.orientation = quat_from_json(*o, field_path(path, "orientation"));
  else
    f.orientation = face_user_orientation(f.position, pose);
  f.width = number_at(j, "width", path);
  f.height = number_at(j, "height", path);
  return f;
}

inline Json to_json(const WindowInstance& w) {
  return Json{{"app", w.app},
              {"provenance", std::string(to_string(w.provenance))},
              {"host", w.host ? to_json(*w.host) : Json(nullptr)},
              {"free", w.free_pose ? to_json(*w.free_pose) : Json(nullptr)}};
}

inline WindowInstance window_from_json(const Json& j, const std::string& path, const UserPose& pose) {
  WindowInstance w;
  w.app = string_at(j, "app", path);
  if (optional_field(j, "provenance"))
    w.provenance = provenance_from_string(string_at(j, "provenance", path));
  if (const Json* h = optional_field(j, "host")) w.host = cellref_from_json(*h, field_path(path, "host"));
  if (const Json* f = optional_field(j, "free"))
    w.free_pose = free_pose_from_json(*f, field_path(path, "free"), pose);
  return w;
}

inline Json to_json(const WorkspaceState& s) {
  Json zones = Json::array();
  for (const ZoneSpec& z : s.zones) zones.push_back(to_json(z));
  Json occlusions = Json::array();
  for (const ZoneSpec& z : s.occlusions) occlusions.push_back(to_json(z));
  Json windows = Json::array();
  for (const WindowInstance& w : s.windows) windows.push_back(to_json(w));
  Json log = Json::array();
  for (const InteractionEvent& e : s.log) log.push_back(to_json(e));
  return Json{{"id", s.id},
              {"revision", s.revision},
              {"pose", to_json(s.pose)},
              {"zones", std::move(zones)},
              {"occlusions", std::move(occlusions)},
              {"windows", std::move(windows)},
              {"pending", s.pending ? to_json(*s.pending) : Json(nullptr)},
              {"proposal_seq", s.proposal_seq},
              {"log", std::move(log)}};
}

/// Only "pose" is mandatory. Occlusion zones may appear in "zones" and are
/// moved to the occlusion list. Windows listed as hosted fill their cells.
inline WorkspaceState state_from_json(const Json& j, const std::string& path = {}) {
  WorkspaceState s;
  if (optional_field(j, "id")) s.id = string_at(j, "id", path);
  if (optional_field(j, "revision")) s.revision = revision_at(j, "revision", path);
  if (optional_field(j, "proposal_seq")) s.proposal_seq = revision_at(j, "proposal_seq", path);
  try {
    s.pose = pose_from_json(require(j, "pose", path), field_path(path, "pose"));
    s.pose.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidDocument) throw;
    throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, "pose") + "': " + e.what());
  }
  auto zones_from = [&](const char* key) {
    if (const Json* zs = optional_field(j, key)) {
      if (!zs->is_array())
        throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, key) + "': expected array");
      for (std::size_t i = 0; i < zs->size(); ++i) {
        ZoneSpec z = zone_from_json((*zs)[i], index_path(field_path(path, key), i), s.pose);
        (z.is_occlusion() ? s.occlusions : s.zones).push_back(std::move(z));
      }
    }
  };
  zones_from("zones");
  zones_from("occlusions");
  if (const Json* ws = optional_field(j, "windows")) {
    if (!ws->is_array())
      throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, "windows") + "': expected array");
    for (std::size_t i = 0; i < ws->size(); ++i) {
      WindowInstance w = window_from_json((*ws)[i], index_path(field_path(path, "windows"), i), s.pose);
      if (w.host)
        if (ZoneSpec* z = s.find_zone(w.host->zone);
            z && w.host->cell >= 0 && w.host->cell < static_cast<int>(z->cells.size()) &&
            !z->cells[static_cast<std::size_t>(w.host->cell)].occupant)
          z->cells[static_cast<std::size_t>(w.host->cell)].occupant = w.app;
      s.windows.push_back(std::move(w));
    }
  }
  if (const Json* p = optional_field(j, "pending"))
    s.pending = proposal_from_json(*p, field_path(path, "pending"));
  if (const Json* log = optional_field(j, "log")) {
    if (!log->is_array())
      throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, "log") + "': expected array");
    for (std::size_t i = 0; i < log->size(); ++i)
      s.log.push_back(event_from_json((*log)[i], index_path(field_path(path, "log"), i)));
  }
  try {
    validate_state(s);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidDocument, (path.empty() ? "" : "field '" + path + "': ") + e.what());
  }
  return s;
}

// ---- decisions / acceptance ------------------------------------------------------

inline std::string_view decision_verb(Decision d) {
  switch (d) {
    case Decision::kAccept: return "accept";
    case Decision::kDecline: return "decline";
    case Decision::kOverride: return "override";
  }
  return "?";
}

inline Decision decision_from_string(std::string_view s, const std::string& path) {
  for (Decision d : {Decision::kAccept, Decision::kDecline, Decision::kOverride})
    if (s == decision_verb(d) || s == to_string(d)) return d;
  throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': unknown decision '" + std::string(s) + "'");
}

inline Json to_json(const Decisions& d) {
  Json entries = Json::array();
  for (const EntryDecision& e : d.entries) {
    Json x{{"app", e.app}, {"decision", std::string(decision_verb(e.decision))}};
    x["target"] = e.target ? to_json(*e.target) : Json(nullptr);
    entries.push_back(std::move(x));
  }
  Json zones = Json::object();
  for (const auto& [zone, v] : d.zone_batch) zones[zone] = std::string(decision_verb(v));
  return Json{{"entries", std::move(entries)}, {"zones", std::move(zones)}};
}

inline Decisions decisions_from_json(const Json& j, const std::string& path = {}) {
  Decisions d;
  if (optional_field(j, "entries")) {
    const Json& entries = array_at(j, "entries", path);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string p = index_path(field_path(path, "entries"), i);
      EntryDecision e;
      e.app = string_at(entries[i], "app", p);
      e.decision = decision_from_string(string_at(entries[i], "decision", p), field_path(p, "decision"));
      if (const Json* t = optional_field(entries[i], "target"))
        e.target = cellref_from_json(*t, field_path(p, "target"));
      d.entries.push_back(std::move(e));
    }
  }
  if (const Json* zones = optional_field(j, "zones")) {
    if (!zones->is_object())
      throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, "zones") + "': expected object");
    for (auto it = zones->begin(); it != zones->end(); ++it) {
      const std::string p = field_path(field_path(path, "zones"), it.key());
      if (!it->is_string()) throw Error(ErrorCode::kInvalidDocument, "field '" + p + "': expected string");
      d.zone_batch[it.key()] = decision_from_string(it->get<std::string>(), p);
    }
  }
  return d;
}

inline Json to_json(const AcceptanceRecord& r) {
  Json decisions = Json::array();
  for (const AcceptanceEntry& a : r.decisions)
    decisions.push_back(Json{{"app", a.app},
                             {"proposed", to_json(a.proposed)},
                             {"decision", std::string(to_string(a.decision))},
                             {"placed", a.placed ? to_json(*a.placed) : Json(nullptr)}});
  return Json{{"proposal_id", r.proposal_id},
              {"decisions", std::move(decisions)},
              {"apps_accepted", r.apps_accepted},
              {"apps_rejected", r.apps_rejected},
              {"apps_overridden", r.apps_overridden},
              {"layouts_adjusted", r.layouts_adjusted},
              {"reorderings", r.reorderings}};
}

inline AcceptanceRecord acceptance_from_json(const Json& j, const std::string& path = {}) {
  AcceptanceRecord r;
  r.proposal_id = string_at(j, "proposal_id", path);
  const Json& decisions = array_at(j, "decisions", path);
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const std::string p = index_path(field_path(path, "decisions"), i);
    AcceptanceEntry a;
    a.app = string_at(decisions[i], "app", p);
    a.proposed = cellref_from_json(require(decisions[i], "proposed", p), field_path(p, "proposed"));
    a.decision = decision_from_string(string_at(decisions[i], "decision", p), field_path(p, "decision"));
    if (const Json* pl = optional_field(decisions[i], "placed"))
      a.placed = cellref_from_json(*pl, field_path(p, "placed"));
    r.decisions.push_back(std::move(a));
  }
  r.apps_accepted = static_cast<int>(integer_at(j, "apps_accepted", path));
  r.apps_rejected = static_cast<int>(integer_at(j, "apps_rejected", path));
  r.apps_overridden = static_cast<int>(integer_at(j, "apps_overridden", path));
  r.layouts_adjusted = static_cast<int>(integer_at(j, "layouts_adjusted", path));
  r.reorderings = static_cast<int>(integer_at(j, "reorderings", path));
  return r;
}

// ---- configuration ----------------------------------------------------------------

/// Everything tunable from a config file. Angles in degrees on the wire.
struct EngineConfig {
  PlannerConfig planner;
  ProviderSettings provider;
  std::string bind_host = "127.0.0.1";
  int bind_port = 8080;
  std::string snapshot_dir;
  std::string mock_fixtures;
};

inline Json to_json(const EngineConfig& c) {
  const PlannerConfig& p = c.planner;
  const ReadabilityConfig& r = p.sizing.readability;
  return Json{
      {"engine", std::string(to_string(p.engine))},
      {"weights", to_json(p.weights)},
      {"sizing", Json{{"omega_margin", p.sizing.omega_margin}, {"grid_resolution", p.sizing.grid_resolution}}},
      {"readability", Json{{"alpha_min_deg", rad_to_deg(r.alpha_min)},
                           {"default_rows", r.default_rows},
                           {"max_scale", r.max_scale}}},
      {"smoothing", p.smoothing},
      {"oracle_budget", p.oracle_budget},
      {"recommender", Json{{"timeout_seconds", p.recommender.timeout.count() / 1000.0},
                           {"retries", p.recommender.retries},
                           {"allow_fallback", p.recommender.allow_fallback}}},
      {"provider", Json{{"endpoint", c.provider.endpoint}, {"model", c.provider.model}}},
      {"bind", Json{{"host", c.bind_host}, {"port", c.bind_port}}},
      {"snapshot_dir", c.snapshot_dir},
      {"mock_fixtures", c.mock_fixtures}};
}

/// Overlays the fields present in `j` on `base`. Credentials are never read
/// from documents; use the environment.
inline EngineConfig config_from_json(const Json& j, const std::string& path = {},
                                     EngineConfig base = {}) {
  PlannerConfig& p = base.planner;
  try {
    if (optional_field(j, "engine")) p.engine = engine_from_string(string_at(j, "engine", path));
    if (const Json* w = optional_field(j, "weights"))
      p.weights = weights_from_json(*w, field_path(path, "weights"), p.weights);
    if (const Json* s = optional_field(j, "sizing")) {
      const std::string sp = field_path(path, "sizing");
      if (optional_field(*s, "omega_margin")) p.sizing.omega_margin = number_at(*s, "omega_margin", sp);
      if (optional_field(*s, "grid_resolution"))
        p.sizing.grid_resolution = static_cast<int>(integer_at(*s, "grid_resolution", sp));
    }
    if (const Json* r = optional_field(j, "readability")) {
      const std::string rp = field_path(path, "readability");
      ReadabilityConfig& rc = p.sizing.readability;
      if (optional_field(*r, "alpha_min_deg")) rc.alpha_min = deg_to_rad(number_at(*r, "alpha_min_deg", rp));
      if (optional_field(*r, "default_rows"))
        rc.default_rows = static_cast<int>(integer_at(*r, "default_rows", rp));
      if (optional_field(*r, "max_scale")) rc.max_scale = number_at(*r, "max_scale", rp);
    }
    p.sizing.validate();
    if (optional_field(j, "smoothing")) p.smoothing = number_at(j, "smoothing", path);
    if (p.smoothing < 0.0) throw Error(ErrorCode::kDomain, "smoothing must be >= 0");
    if (optional_field(j, "oracle_budget")) p.oracle_budget = number_at(j, "oracle_budget", path);
    if (const Json* r = optional_field(j, "recommender")) {
      const std::string rp = field_path(path, "recommender");
      if (optional_field(*r, "timeout_seconds")) {
        const double t = number_at(*r, "timeout_seconds", rp);
        if (!(t > 0.0)) throw Error(ErrorCode::kDomain, "timeout_seconds must be > 0");
        p.recommender.timeout = std::chrono::milliseconds(static_cast<long long>(t * 1000.0 + 0.5));
        base.provider.timeout_seconds = t;
      }
      if (optional_field(*r, "retries")) {
        p.recommender.retries = static_cast<int>(integer_at(*r, "retries", rp));
        if (p.recommender.retries < 0 || p.recommender.retries > 1)
          throw Error(ErrorCode::kDomain, "retries must be 0 or 1");
        base.provider.retries = p.recommender.retries;
      }
      if (optional_field(*r, "allow_fallback")) p.recommender.allow_fallback = bool_at(*r, "allow_fallback", rp);
    }
    if (const Json* pr = optional_field(j, "provider")) {
      const std::string pp = field_path(path, "provider");
      if (optional_field(*pr, "endpoint")) base.provider.endpoint = string_at(*pr, "endpoint", pp);
      if (optional_field(*pr, "model")) base.provider.model = string_at(*pr, "model", pp);
    }
    if (const Json* b = optional_field(j, "bind")) {
      const std::string bp = field_path(path, "bind");
      if (optional_field(*b, "host")) base.bind_host = string_at(*b, "host", bp);
      if (optional_field(*b, "port")) base.bind_port = static_cast<int>(integer_at(*b, "port", bp));
    }
    if (optional_field(j, "snapshot_dir")) base.snapshot_dir = string_at(j, "snapshot_dir", path);
    if (optional_field(j, "mock_fixtures")) base.mock_fixtures = string_at(j, "mock_fixtures", path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidDocument) throw;
    throw Error(ErrorCode::kInvalidDocument, "config: " + std::string(e.what()));
  }
  return base;
}

/// XRZONE_PROVIDER_{ENDPOINT,KEY,MODEL,TIMEOUT} override the file.
inline void apply_environment(EngineConfig& c) {
  if (const char* v = std::getenv("XRZONE_PROVIDER_ENDPOINT")) c.provider.endpoint = v;
  if (const char* v = std::getenv("XRZONE_PROVIDER_KEY")) c.provider.api_key = v;
  if (const char* v = std::getenv("XRZONE_PROVIDER_MODEL")) c.provider.model = v;
  if (const char* v = std::getenv("XRZONE_PROVIDER_TIMEOUT")) {
    char* end = nullptr;
    const double t = std::strtod(v, &end);
    if (end == v || !(t > 0.0))
      throw Error(ErrorCode::kInvalidDocument, "XRZONE_PROVIDER_TIMEOUT must be a positive number");
    c.provider.timeout_seconds = t;
    c.planner.recommender.timeout = std::chrono::milliseconds(static_cast<long long>(t * 1000.0 + 0.5));
  }
}

// ---- scenario and report -----------------------------------------------------------

struct Scenario {
  std::string name;
  WorkspaceState workspace;
  Goal goal;
  std::vector<AppDescriptor> catalog;
  std::string telemetry;  // ndjson path, relative to the scenario file
  std::string engine = "mock";
  std::uint64_t seed = 0;
  Json config = Json::object();
};

inline Json to_json(const Scenario& s) {
  Json catalog = Json::array();
  for (const AppDescriptor& a : s.catalog) catalog.push_back(to_json(a));
  return Json{{"name", s.name},       {"workspace", to_json(s.workspace)},
              {"goal", to_json(s.goal)}, {"catalog", std::move(catalog)},
              {"telemetry", s.telemetry}, {"engine", s.engine},
              {"seed", s.seed},        {"config", s.config}};
}

inline Scenario scenario_from_json(const Json& j, const std::string& path = {}) {
  Scenario s;
  s.name = optional_field(j, "name") ? string_at(j, "name", path) : "";
  s.workspace = state_from_json(require(j, "workspace", path), field_path(path, "workspace"));
  s.goal = goal_from_json(require(j, "goal", path), field_path(path, "goal"));
  s.catalog = catalog_from_json(require(j, "catalog", path), field_path(path, "catalog"));
  if (optional_field(j, "telemetry")) s.telemetry = string_at(j, "telemetry", path);
  if (optional_field(j, "engine")) s.engine = string_at(j, "engine", path);
  if (s.engine != "mock") engine_from_string(s.engine);
  if (optional_field(j, "seed")) s.seed = revision_at(j, "seed", path);
  if (const Json* c = optional_field(j, "config")) {
    if (!c->is_object())
      throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, "config") + "': expected object");
    s.config = *c;
  }
  return s;
}

/// Outcome of a headless run: the proposal, its auto-accepted resolution and
/// the final workspace.
struct Report {
  std::string scenario;
  std::string engine;
  std::uint64_t seed = 0;
  Proposal proposal;
  AcceptanceRecord acceptance;
  WorkspaceState workspace;
  std::optional<double> wall_time_ms;
};

inline Json to_json(const Report& r) {
  Json zones = Json::array();
  for (const SizingResult& s : r.proposal.sizing)
    zones.push_back(Json{{"zone", s.zone_id},
                         {"theta_star", to_json(s.theta_star)},
                         {"scale_factor", s.scale_factor}});
  Json j{{"scenario", r.scenario},
         {"engine", r.engine},
         {"seed", r.seed},
         {"total_cost", r.proposal.total_cost},
         {"fallback", r.proposal.fallback()},
         {"zones", std::move(zones)},
         {"proposal", to_json(r.proposal)},
         {"acceptance", to_json(r.acceptance)},
         {"workspace", to_json(r.workspace)}};
  j["wall_time_ms"] = r.wall_time_ms ? Json(*r.wall_time_ms) : Json(nullptr);
  return j;
}

inline Report report_from_json(const Json& j, const std::string& path = {}) {
  Report r;
  r.scenario = string_at(j, "scenario", path);
  r.engine = string_at(j, "engine", path);
  r.seed = revision_at(j, "seed", path);
  r.proposal = proposal_from_json(require(j, "proposal", path), field_path(path, "proposal"));
  r.acceptance = acceptance_from_json(require(j, "acceptance", path), field_path(path, "acceptance"));
  r.workspace = state_from_json(require(j, "workspace", path), field_path(path, "workspace"));
  if (const Json* w = optional_field(j, "wall_time_ms")) r.wall_time_ms = get_number(*w, field_path(path, "wall_time_ms"));
  // Summary fields must agree with the embedded proposal.
  if (number_at(j, "total_cost", path) != r.proposal.total_cost ||
      bool_at(j, "fallback", path) != r.proposal.fallback() ||
      array_at(j, "zones", path).size() != r.proposal.sizing.size())
    throw Error(ErrorCode::kInvalidDocument, "report summary disagrees with its proposal");
  return r;
}

inline Json to_json(const std::vector<InteractionEvent>& events) {
  Json a = Json::array();
  for (const InteractionEvent& e : events) a.push_back(to_json(e));
  return Json{{"events", std::move(a)}};
}

inline std::vector<InteractionEvent> events_from_json(const Json& j, const std::string& path = {}) {
  std::vector<InteractionEvent> out;
  const Json& a = array_at(j, "events", path);
  for (std::size_t i = 0; i < a.size(); ++i)
    out.push_back(event_from_json(a[i], index_path(field_path(path, "events"), i)));
  return out;
}

}  // namespace xrzone

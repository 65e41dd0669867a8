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

#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "xrzone/session.hpp"
#include "xrzone/wire.hpp"

namespace xrzone {

struct HttpResponse {
  int status = 200;
  std::string body;
};

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDocument:
    case ErrorCode::kDomain:
    case ErrorCode::kDegenerateCell:
    case ErrorCode::kIncompleteDecisions:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kDuplicate:
    case ErrorCode::kPendingExists:
    case ErrorCode::kNoPending:
    case ErrorCode::kStaleRevision:
      return 409;
    case ErrorCode::kOccupied:
    case ErrorCode::kIntrusion:
    case ErrorCode::kUnresolvable:
    case ErrorCode::kOverlap:
    case ErrorCode::kTooLarge:
      return 422;
    case ErrorCode::kProvider:
      return 502;
    case ErrorCode::kTimeout:
      return 504;
  }
  return 500;
}

/// Error body. "field" is lifted out of messages of the form "field 'a.b': ...".
inline Json error_body(const Error& e) {
  Json j{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  static const std::regex field_re("field '([^']*)'");
  std::smatch m;
  const std::string msg = e.what();
  j["field"] = std::regex_search(msg, m, field_re) ? Json(m[1].str()) : Json(nullptr);
  return j;
}

/// Transport-independent request handler. Bodies are envelopes in both
/// directions.
class Service {
 public:
  Service(EngineConfig config, std::vector<AppDescriptor> catalog,
          std::shared_ptr<LanguageModelProvider> provider)
      : config_(std::move(config)), catalog_(std::move(catalog)), provider_(std::move(provider)) {}

  const EngineConfig& config() const { return config_; }

  std::shared_ptr<WorkspaceSession> session(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "no workspace '" + id + "'");
    return it->second;
  }

  HttpResponse handle(const std::string& method, const std::string& target, const std::string& body) {
    std::string request_id;
    try {
      const auto [path, query] = split_target(target);
      std::vector<std::string> parts;
      for (std::size_t pos = 1; pos <= path.size();) {
        const std::size_t next = path.find('/', pos);
        parts.push_back(path.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
      }
      if (parts.size() < 2 || parts[0] != "v1" || parts[1] != "workspaces")
        return error(Error(ErrorCode::kNotFound, "no route " + path), request_id);
      if (parts.size() == 2 && method == "POST") return create(body, request_id);
      if (parts.size() == 3 && method == "GET") return get(parts[2]);
      if (parts.size() == 4 && method == "POST") {
        const std::string& action = parts[3];
        if (action == "recommend") return recommend(parts[2], body, query, request_id);
        if (action == "resolve") return resolve(parts[2], body, request_id);
        if (action == "events") return events(parts[2], body, request_id);
        if (action == "ops") return ops(parts[2], body, request_id);
      }
      return error(Error(ErrorCode::kNotFound, "no route " + method + " " + path), request_id);
    } catch (const Error& e) {
      return error(e, request_id);
    } catch (const std::exception& e) {
      return {500, wrap("error", Json{{"code", "internal"}, {"message", e.what()}, {"field", nullptr}},
                        request_id)};
    }
  }

 private:
  static std::pair<std::string, std::string> split_target(const std::string& target) {
    const std::size_t q = target.find('?');
    if (q == std::string::npos) return {target, ""};
    return {target.substr(0, q), target.substr(q + 1)};
  }

  static bool query_flag(const std::string& query, const std::string& key) {
    const std::regex re("(^|&)" + key + "=(1|true)(&|$)");
    return std::regex_search(query, re);
  }

  static HttpResponse error(const Error& e, const std::string& request_id) {
    return {http_status(e.code()), wrap("error", error_body(e), request_id)};
  }

  static Envelope read(const std::string& body, std::string_view kind, std::string& request_id) {
    Envelope e = expect_envelope(body, kind);
    request_id = e.request_id;
    return e;
  }

  void persist(const std::string& id, const WorkspaceState& s) const {
    if (config_.snapshot_dir.empty()) return;
    std::ofstream out(config_.snapshot_dir + "/" + id + ".json");
    out << wrap("workspace_state", to_json(s));
  }

  HttpResponse create(const std::string& body, std::string& request_id) {
    const Envelope e = read(body, "workspace_state", request_id);
    WorkspaceState s = state_from_json(e.body);
    s.revision = 0;
    s.pending.reset();
    std::lock_guard lock(mu_);
    if (s.id.empty()) {
      do s.id = "ws-" + std::to_string(++next_id_);
      while (sessions_.count(s.id));
    }
    if (sessions_.count(s.id)) throw Error(ErrorCode::kDuplicate, "workspace '" + s.id + "' exists");
    auto session = std::make_shared<WorkspaceSession>(s);
    sessions_.emplace(s.id, session);
    persist(s.id, s);
    return {201, wrap("session", Json{{"id", s.id}, {"revision", s.revision}}, request_id)};
  }

  HttpResponse get(const std::string& id) const {
    return {200, wrap("workspace_state", to_json(session(id)->snapshot()))};
  }

  HttpResponse recommend(const std::string& id, const std::string& body, const std::string& query,
                         std::string& request_id) {
    auto s = session(id);
    const Envelope e = read(body, "recommend", request_id);
    WorkspaceSession::RecommendRequest req;
    req.goal = goal_from_json(require(e.body, "goal"), "goal");
    req.catalog = optional_field(e.body, "catalog") ? catalog_from_json(e.body["catalog"], "catalog") : catalog_;
    if (req.catalog.empty()) throw Error(ErrorCode::kInvalidDocument, "field 'catalog': no catalog available");
    req.config = config_.planner;
    if (optional_field(e.body, "engine")) req.config.engine = engine_from_string(string_at(e.body, "engine"));
    if (optional_field(e.body, "allow_fallback"))
      req.config.recommender.allow_fallback = bool_at(e.body, "allow_fallback");
    req.provider = provider_;
    if (query_flag(query, "async")) {
      const Proposal p = s->recommend_async(std::move(req));
      return {202, wrap("proposal", to_json(p), request_id)};
    }
    const Proposal p = s->recommend(std::move(req));
    return {200, wrap("proposal", to_json(p), request_id)};
  }

  HttpResponse resolve(const std::string& id, const std::string& body, std::string& request_id) {
    auto s = session(id);
    const Envelope e = read(body, "decisions", request_id);
    std::optional<std::uint64_t> expected;
    if (optional_field(e.body, "expected_revision")) expected = revision_at(e.body, "expected_revision", "");
    const Resolution r = s->resolve(decisions_from_json(e.body), expected);
    persist(id, r.state);
    return {200, wrap("resolution",
                      Json{{"acceptance", to_json(r.record)}, {"state", to_json(r.state)}}, request_id)};
  }

  HttpResponse events(const std::string& id, const std::string& body, std::string& request_id) {
    auto s = session(id);
    const Envelope e = read(body, "event_batch", request_id);
    const std::size_t n = s->ingest(events_from_json(e.body));
    const WorkspaceState st = s->snapshot();
    persist(id, st);
    return {200, wrap("event_batch",
                      Json{{"stored", n}, {"log_size", st.log.size()}, {"revision", st.revision}},
                      request_id)};
  }

  HttpResponse ops(const std::string& id, const std::string& body, std::string& request_id) {
    auto s = session(id);
    const Envelope e = read(body, "op", request_id);
    const Json& b = e.body;
    const std::string op = string_at(b, "op");
    const std::uint64_t expected = revision_at(b, "expected_revision", "");
    bool clamped = false;
    WorkspaceState out;
    if (op == "undo") {
      out = s->undo(expected);
    } else {
      out = s->mutate(expected, [&](const WorkspaceState& st) { return apply_op(st, op, b, clamped); });
    }
    persist(id, out);
    return {200, wrap("op_result",
                      Json{{"op", op}, {"revision", out.revision}, {"clamped", clamped},
                           {"state", to_json(out)}},
                      request_id)};
  }

  static KnobAxis axis_from_string(const std::string& s) {
    if (s == "vertical" || s == "w0") return KnobAxis::kVertical;
    if (s == "horizontal" || s == "h0") return KnobAxis::kHorizontal;
    throw Error(ErrorCode::kInvalidDocument, "field 'axis': expected vertical or horizontal");
  }

  WorkspaceState apply_op(const WorkspaceState& st, const std::string& op, const Json& b,
                          bool& clamped) const {
    if (op == "drag_in")
      return drag_window_in(st, string_at(b, "app"), cellref_from_json(require(b, "target"), "target"));
    if (op == "drag_out")
      return drag_window_out(st, string_at(b, "app"), vec3_from_json(require(b, "position"), "position"));
    if (op == "add_window")
      return add_window(st, string_at(b, "app"), free_pose_from_json(require(b, "free"), "free", st.pose));
    if (op == "remove_window") return remove_window(st, string_at(b, "app"));
    if (op == "inner_knob") {
      InnerKnobOutcome r = move_inner_knob(st, string_at(b, "zone"), axis_from_string(string_at(b, "axis")),
                                           number_at(b, "value"), config_.planner.sizing.omega_margin);
      clamped = r.clamped;
      return std::move(r.state);
    }
    if (op == "outer_knob")
      return move_outer_knob(st, string_at(b, "zone"), number_at(b, "width"), number_at(b, "height"));
    if (op == "translate_zone")
      return translate_zone(st, string_at(b, "zone"), vec3_from_json(require(b, "position"), "position"));
    if (op == "create_zone" || op == "create_occlusion") {
      ZoneSpec z = zone_from_json(require(b, "zone"), "zone", st.pose);
      if ((op == "create_occlusion") != z.is_occlusion())
        throw Error(ErrorCode::kInvalidDocument, "field 'zone.kind': does not match op '" + op + "'");
      return z.is_occlusion() ? create_occlusion(st, std::move(z)) : create_zone(st, std::move(z));
    }
    if (op == "delete_zone") {
      const std::string zone = string_at(b, "zone");
      return st.find_occlusion(zone) ? delete_occlusion(st, zone) : delete_zone(st, zone);
    }
    if (op == "lock_zone") return set_zone_locked(st, string_at(b, "zone"), bool_at(b, "locked"));
    throw Error(ErrorCode::kInvalidDocument, "field 'op': unknown '" + op + "'");
  }

  EngineConfig config_;
  std::vector<AppDescriptor> catalog_;
  std::shared_ptr<LanguageModelProvider> provider_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<WorkspaceSession>> sessions_;
  std::uint64_t next_id_ = 0;
};

}  // namespace xrzone

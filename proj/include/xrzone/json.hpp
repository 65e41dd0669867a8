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

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "xrzone/costmodel.hpp"
#include "xrzone/errors.hpp"
#include "xrzone/geometry.hpp"
#include "xrzone/layout.hpp"
#include "xrzone/telemetry.hpp"
#include "xrzone/types.hpp"

/// Canonical JSON profile shared by the wire schema, prompts and reports:
/// insertion-ordered objects, floats printed with 9 significant digits,
/// negative zero folded to zero. Parsing a canonical document and printing
/// it again reproduces the same bytes.
namespace xrzone {

using Json = nlohmann::ordered_json;

inline std::string format_number(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidDocument, "non-finite number");
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace detail {

inline void dump_canonical(const Json& j, std::string& out, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_canonical(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const Json& e : j) flat = flat && !e.is_structured();
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += indent >= 0 && flat ? ", " : ",";
        if (!flat) newline(depth + 1);
        dump_canonical(j[i], out, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// indent < 0 gives the compact form used in prompts.
inline std::string canonical_dump(const Json& j, int indent = 2) {
  std::string out;
  detail::dump_canonical(j, out, indent, 0);
  if (indent >= 0) out += '\n';
  return out;
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidDocument, std::string("malformed JSON: ") + e.what());
  }
}

// ---- field access with path diagnostics ---------------------------------

inline std::string field_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline const Json& require(const Json& j, const std::string& key, const std::string& path = {}) {
  if (!j.is_object())
    throw Error(ErrorCode::kInvalidDocument, "field '" + (path.empty() ? "<root>" : path) +
                                                 "': expected object");
  auto it = j.find(key);
  if (it == j.end())
    throw Error(ErrorCode::kInvalidDocument,
                "field '" + field_path(path, key) + "': missing");
  return *it;
}

inline const Json* optional_field(const Json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline double get_number(const Json& j, const std::string& path) {
  if (!j.is_number())
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': expected number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': non-finite");
  return v;
}

inline double number_at(const Json& j, const std::string& key, const std::string& path = {}) {
  return get_number(require(j, key, path), field_path(path, key));
}

inline long long integer_at(const Json& j, const std::string& key, const std::string& path = {}) {
  const Json& v = require(j, key, path);
  if (!v.is_number_integer())
    throw Error(ErrorCode::kInvalidDocument,
                "field '" + field_path(path, key) + "': expected integer");
  return v.get<long long>();
}

inline std::string string_at(const Json& j, const std::string& key, const std::string& path = {}) {
  const Json& v = require(j, key, path);
  if (!v.is_string())
    throw Error(ErrorCode::kInvalidDocument,
                "field '" + field_path(path, key) + "': expected string");
  return v.get<std::string>();
}

inline bool bool_at(const Json& j, const std::string& key, const std::string& path = {}) {
  const Json& v = require(j, key, path);
  if (!v.is_boolean())
    throw Error(ErrorCode::kInvalidDocument,
                "field '" + field_path(path, key) + "': expected boolean");
  return v.get<bool>();
}

inline const Json& array_at(const Json& j, const std::string& key, const std::string& path = {}) {
  const Json& v = require(j, key, path);
  if (!v.is_array())
    throw Error(ErrorCode::kInvalidDocument,
                "field '" + field_path(path, key) + "': expected array");
  return v;
}

inline std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// ---- geometry -------------------------------------------------------------

inline Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': expected [x, y, z]");
  return {get_number(j[0], path), get_number(j[1], path), get_number(j[2], path)};
}

inline Json to_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

inline Vec2 vec2_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': expected [x, y]");
  return {get_number(j[0], path), get_number(j[1], path)};
}

inline Json to_json(const Quat& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

inline Quat quat_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4)
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': expected [w, x, y, z]");
  Quat q(get_number(j[0], path), get_number(j[1], path), get_number(j[2], path),
         get_number(j[3], path));
  if (std::abs(q.norm() - 1.0) > 1e-6)
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': quaternion not unit");
  return q;
}

inline Json to_json(const UserPose& p) {
  return Json{{"position", to_json(p.position)}, {"forward", to_json(p.forward)}};
}

inline UserPose pose_from_json(const Json& j, const std::string& path) {
  UserPose p;
  p.position = vec3_from_json(require(j, "position", path), field_path(path, "position"));
  p.forward = vec3_from_json(require(j, "forward", path), field_path(path, "forward"));
  const double n = p.forward.norm();
  if (!(n > 0.0))
    throw Error(ErrorCode::kInvalidDocument, "field '" + field_path(path, "forward") + "': zero");
  // Accept slightly off-unit vectors from 9-digit documents.
  if (std::abs(n - 1.0) > 1e-9) {
    if (std::abs(n - 1.0) > 1e-6)
      throw Error(ErrorCode::kInvalidDocument,
                  "field '" + field_path(path, "forward") + "': not a unit vector");
    p.forward /= n;
  }
  return p;
}

/// Degrees on the wire.
inline Json to_json(const AngularFootprint& fp) {
  return Json{{"azimuth_deg", Json::array({rad_to_deg(fp.azimuth.lo), rad_to_deg(fp.azimuth.hi)})},
              {"elevation_deg",
               Json::array({rad_to_deg(fp.elevation.lo), rad_to_deg(fp.elevation.hi)})},
              {"behind_user", fp.behind_user}};
}

// ---- layout ---------------------------------------------------------------

inline Json to_json(const ThetaParams& t) { return Json{{"w0", t.w0}, {"h0", t.h0}}; }

inline ThetaParams theta_from_json(const Json& j, const std::string& path) {
  return {number_at(j, "w0", path), number_at(j, "h0", path)};
}

inline Json to_json(const Cell& c) {
  Json j{{"index", c.index}, {"origin", to_json(c.origin)}, {"width", c.width},
         {"height", c.height}};
  j["occupant"] = c.occupant ? Json(*c.occupant) : Json(nullptr);
  return j;
}

inline Json to_json(const ZoneSpec& z) {
  Json cells = Json::array();
  for (const Cell& c : z.cells) cells.push_back(to_json(c));
  return Json{{"id", z.id},
              {"kind", std::string(to_string(z.kind))},
              {"width", z.width},
              {"height", z.height},
              {"position", to_json(z.position)},
              {"orientation", to_json(z.orientation)},
              {"theta", to_json(z.theta)},
              {"locked", z.locked},
              {"cells", std::move(cells)}};
}

/// Without "orientation" the zone is faced toward `pose`; without "theta" the
/// default split is used; without "cells" they are instantiated.
inline ZoneSpec zone_from_json(const Json& j, const std::string& path, const UserPose& pose) {
  ZoneSpec z;
  z.id = string_at(j, "id", path);
  if (z.id.empty()) throw Error(ErrorCode::kInvalidDocument, "field '" + path + ".id': empty");
  z.kind = template_from_string(string_at(j, "kind", path));
  z.width = number_at(j, "width", path);
  z.height = number_at(j, "height", path);
  if (!(z.width > 0.0) || !(z.height > 0.0))
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': width/height must be > 0");
  z.position = vec3_from_json(require(j, "position", path), field_path(path, "position"));
  if ((z.position - pose.position).norm() <= 0.0)
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + ".position': at the user");
  if (const Json* o = optional_field(j, "orientation"))
    z.orientation = quat_from_json(*o, field_path(path, "orientation"));
  else
    z.orientation = face_user_orientation(z.position, pose);
  z.theta = default_theta(z.width, z.height);
  if (const Json* t = optional_field(j, "theta")) z.theta = theta_from_json(*t, field_path(path, "theta"));
  if (const Json* l = optional_field(j, "locked")) {
    if (!l->is_boolean())
      throw Error(ErrorCode::kInvalidDocument, "field '" + path + ".locked': expected boolean");
    z.locked = l->get<bool>();
  }

  std::vector<Cell> expected;
  try {
    expected = instantiate(z.kind, z.width, z.height, z.theta);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + ".theta': " + e.what());
  }
  if (const Json* cells = optional_field(j, "cells")) {
    const std::string cpath = field_path(path, "cells");
    if (!cells->is_array() || cells->size() != expected.size())
      throw Error(ErrorCode::kInvalidDocument,
                  "field '" + cpath + "': expected " + std::to_string(expected.size()) + " cells");
    for (std::size_t i = 0; i < cells->size(); ++i) {
      const Json& cj = (*cells)[i];
      const std::string p = index_path(cpath, i);
      Cell c;
      c.index = static_cast<int>(integer_at(cj, "index", p));
      c.origin = vec2_from_json(require(cj, "origin", p), field_path(p, "origin"));
      c.width = number_at(cj, "width", p);
      c.height = number_at(cj, "height", p);
      const Cell& e = expected[i];
      const double tol = 1e-6 * std::max(z.width, z.height);
      if (c.index != e.index || (c.origin - e.origin).norm() > tol ||
          std::abs(c.width - e.width) > tol || std::abs(c.height - e.height) > tol)
        throw Error(ErrorCode::kInvalidDocument,
                    "field '" + p + "': cell geometry disagrees with template and theta");
      if (const Json* occ = optional_field(cj, "occupant")) {
        if (!occ->is_string())
          throw Error(ErrorCode::kInvalidDocument, "field '" + p + ".occupant': expected string");
        c.occupant = occ->get<std::string>();
      }
      z.cells.push_back(std::move(c));
    }
  } else {
    z.cells = std::move(expected);
  }
  return z;
}

// ---- planning records -----------------------------------------------------

inline Json to_json(const Goal& g) {
  return Json{{"text", g.text}, {"source", std::string(to_string(g.source))}};
}

inline Goal goal_from_json(const Json& j, const std::string& path) {
  Goal g;
  if (j.is_string()) {
    g.text = j.get<std::string>();
  } else {
    g.text = string_at(j, "text", path);
    if (const Json* s = optional_field(j, "source")) {
      const std::string src = s->is_string() ? s->get<std::string>() : "";
      if (src == "typed") g.source = GoalSource::kTyped;
      else if (src == "transcribed") g.source = GoalSource::kTranscribed;
      else throw Error(ErrorCode::kInvalidDocument, "field '" + path + ".source': unknown");
    }
  }
  try {
    g.validate();
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': goal text is empty");
  }
  return g;
}

inline Json to_json(const AppDescriptor& a) {
  return Json{{"id", a.id},
              {"name", a.name},
              {"category", a.category},
              {"preferred_aspect", std::string(to_string(a.preferred_aspect))},
              {"min_rows", a.min_rows},
              {"keywords", a.keywords}};
}

inline AppDescriptor app_from_json(const Json& j, const std::string& path) {
  AppDescriptor a;
  a.id = string_at(j, "id", path);
  a.name = optional_field(j, "name") ? string_at(j, "name", path) : a.id;
  a.category = optional_field(j, "category") ? string_at(j, "category", path) : "";
  if (optional_field(j, "preferred_aspect")) {
    const std::string s = string_at(j, "preferred_aspect", path);
    if (s == "landscape") a.preferred_aspect = Aspect::kLandscape;
    else if (s == "portrait") a.preferred_aspect = Aspect::kPortrait;
    else if (s == "any") a.preferred_aspect = Aspect::kAny;
    else throw Error(ErrorCode::kInvalidDocument, "field '" + path + ".preferred_aspect': unknown");
  }
  if (optional_field(j, "min_rows")) a.min_rows = static_cast<int>(integer_at(j, "min_rows", path));
  if (const Json* k = optional_field(j, "keywords")) {
    if (!k->is_array())
      throw Error(ErrorCode::kInvalidDocument, "field '" + path + ".keywords': expected array");
    for (const Json& w : *k) a.keywords.push_back(w.get<std::string>());
  }
  return a;
}

inline std::vector<AppDescriptor> catalog_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': expected array");
  std::vector<AppDescriptor> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(app_from_json(j[i], index_path(path, i)));
  try {
    validate_catalog(out);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': " + e.what());
  }
  return out;
}

inline Json to_json(const RelevanceSet& r) {
  Json entries = Json::array();
  for (const RelevanceEntry& e : r.entries) entries.push_back(Json{{"app", e.app}, {"r", e.r}});
  return Json{{"goal", to_json(r.goal)}, {"entries", std::move(entries)}};
}

inline RelevanceSet relevance_from_json(const Json& j, const std::string& path) {
  RelevanceSet r;
  r.goal = goal_from_json(require(j, "goal", path), field_path(path, "goal"));
  const Json& entries = array_at(j, "entries", path);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string p = index_path(field_path(path, "entries"), i);
    r.entries.push_back({string_at(entries[i], "app", p), number_at(entries[i], "r", p)});
  }
  return r;
}

inline Json to_json(const CellRef& c) { return Json{{"zone", c.zone}, {"cell", c.cell}}; }

inline Json to_json(const Assignment& a) {
  Json entries = Json::array();
  for (const AssignmentEntry& e : a.entries)
    entries.push_back(Json{{"app", e.app},
                           {"zone", e.cell.zone},
                           {"cell", e.cell.cell},
                           {"provenance", std::string(to_string(e.provenance))}});
  return Json{{"entries", std::move(entries)}, {"unassigned", a.unassigned}};
}

inline Assignment assignment_from_json(const Json& j, const std::string& path) {
  Assignment a;
  const Json& entries = array_at(j, "entries", path);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string p = index_path(field_path(path, "entries"), i);
    a.add(string_at(entries[i], "app", p),
          {string_at(entries[i], "zone", p), static_cast<int>(integer_at(entries[i], "cell", p))},
          provenance_from_string(string_at(entries[i], "provenance", p)));
  }
  if (const Json* u = optional_field(j, "unassigned")) {
    for (const Json& s : *u) a.unassigned.push_back(s.get<std::string>());
  }
  return a;
}

inline Json to_json(const CostMatrix& c) {
  Json entries = Json::array();
  for (const CostEntry& e : c.entries)
    entries.push_back(Json{{"zone", e.cell.zone}, {"cell", e.cell.cell}, {"cost", e.cost}});
  return Json{{"app", c.app}, {"context", c.context}, {"entries", std::move(entries)}};
}

inline Json to_json(const CostWeights& w) {
  return Json{{"lambda_f", w.lambda_f}, {"lambda_h", w.lambda_h}, {"lambda_m", w.lambda_m},
              {"lambda_s", w.lambda_s}};
}

inline CostWeights weights_from_json(const Json& j, const std::string& path,
                                     CostWeights base = {}) {
  if (optional_field(j, "lambda_f")) base.lambda_f = number_at(j, "lambda_f", path);
  if (optional_field(j, "lambda_h")) base.lambda_h = number_at(j, "lambda_h", path);
  if (optional_field(j, "lambda_m")) base.lambda_m = number_at(j, "lambda_m", path);
  if (optional_field(j, "lambda_s")) base.lambda_s = number_at(j, "lambda_s", path);
  try {
    base.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidDocument, "field '" + path + "': " + e.what());
  }
  return base;
}

// ---- telemetry ------------------------------------------------------------

inline Json to_json(const InteractionEvent& e) {
  Json j{{"timestamp", e.timestamp}, {"kind", std::string(to_string(e.kind))}};
  j["app"] = e.app ? Json(*e.app) : Json(nullptr);
  j["hand_position"] = e.hand_position ? to_json(*e.hand_position) : Json(nullptr);
  return j;
}

inline InteractionEvent event_from_json(const Json& j, const std::string& path) {
  InteractionEvent e;
  e.timestamp = number_at(j, "timestamp", path);
  e.kind = event_kind_from_string(string_at(j, "kind", path));
  if (optional_field(j, "app")) e.app = string_at(j, "app", path);
  if (const Json* h = optional_field(j, "hand_position"))
    e.hand_position = vec3_from_json(*h, field_path(path, "hand_position"));
  return e;
}

/// Newline-delimited event log: one compact canonical record per line.
inline std::string events_to_ndjson(const std::vector<InteractionEvent>& log) {
  std::string out;
  for (const InteractionEvent& e : log) out += canonical_dump(to_json(e), -1) + "\n";
  return out;
}

inline std::vector<InteractionEvent> events_from_ndjson(std::string_view text) {
  std::vector<InteractionEvent> out;
  std::size_t line = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view row = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line;
    if (row.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(event_from_json(parse_json(row), "line " + std::to_string(line)));
  }
  check_time_ordered(out);
  return out;
}

inline Json to_json(const TransitionMatrix& tm) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < tm.P.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < tm.P.cols(); ++k) row.push_back(tm.P(i, k));
    rows.push_back(std::move(row));
  }
  return Json{{"apps", tm.apps}, {"P", std::move(rows)}};
}

}  // namespace xrzone

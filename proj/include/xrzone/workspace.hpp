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
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xrzone/assignment.hpp"
#include "xrzone/costmodel.hpp"
#include "xrzone/errors.hpp"
#include "xrzone/geometry.hpp"
#include "xrzone/layout.hpp"
#include "xrzone/recommender.hpp"
#include "xrzone/sizing.hpp"
#include "xrzone/telemetry.hpp"
#include "xrzone/types.hpp"

namespace xrzone {

// ---- state ------------------------------------------------------------------

/// Placement of a window floating outside any zone.
struct FreePose {
  Vec3 position = Vec3(0.0, 0.0, 2.0);
  Quat orientation = Quat::Identity();
  double width = 0.5;
  double height = 0.4;

  PlanarRect rect() const { return {position, orientation, width, height}; }
};

struct WindowInstance {
  std::string app;
  std::optional<FreePose> free_pose;
  std::optional<CellRef> host;
  Provenance provenance = Provenance::kUserPinned;
};

enum class ProposalStatus { kPending, kReady, kFailed };

inline std::string_view to_string(ProposalStatus s) {
  switch (s) {
    case ProposalStatus::kPending: return "pending";
    case ProposalStatus::kReady: return "ready";
    case ProposalStatus::kFailed: return "failed";
  }
  return "?";
}

enum class Engine { kLlm, kGreedy, kOracle };

inline std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::kLlm: return "llm";
    case Engine::kGreedy: return "greedy";
    case Engine::kOracle: return "oracle";
  }
  return "?";
}

inline Engine engine_from_string(std::string_view s) {
  if (s == "llm" || s == "mock") return Engine::kLlm;
  if (s == "greedy") return Engine::kGreedy;
  if (s == "oracle") return Engine::kOracle;
  throw Error(ErrorCode::kInvalidDocument, "unknown engine '" + std::string(s) + "'");
}

/// An AI recommendation held aside until the user resolves it.
struct Proposal {
  std::string id;
  ProposalStatus status = ProposalStatus::kPending;
  Goal goal;
  std::uint64_t base_revision = 0;
  std::string engine;
  RelevanceSet relevance;
  Assignment assignment;  // proposed entries only
  std::vector<SizingResult> sizing;
  std::vector<OcclusionConflict> conflicts;  // after scale-up, not auto-resolved
  double total_cost = 0.0;
  bool relevance_fallback = false;
  bool assignment_fallback = false;
  std::vector<std::string> warnings;
  std::string error;

  bool fallback() const { return relevance_fallback || assignment_fallback; }

  const SizingResult* sizing_for(std::string_view zone) const {
    for (const SizingResult& s : sizing)
      if (s.zone_id == zone) return &s;
    return nullptr;
  }
};

struct WorkspaceState {
  std::string id;
  UserPose pose;
  std::vector<ZoneSpec> zones;
  std::vector<ZoneSpec> occlusions;
  std::vector<WindowInstance> windows;
  std::optional<Proposal> pending;
  std::vector<InteractionEvent> log;
  std::uint64_t revision = 0;
  std::uint64_t proposal_seq = 0;

  const ZoneSpec* find_zone(std::string_view zone) const {
    for (const ZoneSpec& z : zones)
      if (z.id == zone) return &z;
    return nullptr;
  }
  ZoneSpec* find_zone(std::string_view zone) {
    return const_cast<ZoneSpec*>(static_cast<const WorkspaceState&>(*this).find_zone(zone));
  }
  const ZoneSpec* find_occlusion(std::string_view id) const {
    for (const ZoneSpec& z : occlusions)
      if (z.id == id) return &z;
    return nullptr;
  }
  const WindowInstance* find_window(std::string_view app) const {
    for (const WindowInstance& w : windows)
      if (w.app == app) return &w;
    return nullptr;
  }
  WindowInstance* find_window(std::string_view app) {
    return const_cast<WindowInstance*>(static_cast<const WorkspaceState&>(*this).find_window(app));
  }

  ZoneSpec& zone(std::string_view id) {
    ZoneSpec* z = find_zone(id);
    if (!z) throw Error(ErrorCode::kNotFound, "no zone '" + std::string(id) + "'");
    return *z;
  }
  WindowInstance& window(std::string_view app) {
    WindowInstance* w = find_window(app);
    if (!w) throw Error(ErrorCode::kNotFound, "no window '" + std::string(app) + "'");
    return *w;
  }

  /// Hosted windows as the pinned part of an assignment, in zone then cell order.
  Assignment hosted_assignment() const {
    Assignment a;
    for (const ZoneSpec& z : zones)
      for (const Cell& c : z.cells)
        if (c.occupant) {
          const WindowInstance* w = find_window(*c.occupant);
          a.add(*c.occupant, {z.id, c.index}, w ? w->provenance : Provenance::kUserPinned);
        }
    return a;
  }
};

/// Angular footprint of a window, hosted or free.
inline PlanarRect window_rect(const WorkspaceState& s, const WindowInstance& w) {
  if (w.free_pose) return w.free_pose->rect();
  const ZoneSpec* z = s.find_zone(w.host->zone);
  const Cell& c = z->cell(w.host->cell);
  return {z->local_to_world(c.local_center()), z->orientation, c.width, c.height};
}

/// Checks every state invariant; throws kInvalidDocument naming the first
/// broken one.
inline void validate_state(const WorkspaceState& s) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidDocument, what); };
  s.pose.validate();
  std::set<std::string> ids;
  for (const ZoneSpec& z : s.zones) {
    if (z.is_occlusion()) fail("zone '" + z.id + "' uses the occlusion template");
    if (!ids.insert(z.id).second) fail("duplicate zone id '" + z.id + "'");
    if (static_cast<int>(z.cells.size()) != cell_count(z.kind)) fail("zone '" + z.id + "' cell count");
  }
  for (const ZoneSpec& o : s.occlusions) {
    if (!o.is_occlusion()) fail("occlusion '" + o.id + "' has cells");
    if (!ids.insert(o.id).second) fail("duplicate zone id '" + o.id + "'");
  }
  for (std::size_t i = 0; i < s.occlusions.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (footprints_overlap(angular_footprint(s.occlusions[i], s.pose),
                             angular_footprint(s.occlusions[j], s.pose)))
        fail("occlusions '" + s.occlusions[i].id + "' and '" + s.occlusions[j].id + "' overlap");

  std::set<std::string> apps;
  std::set<CellRef> hosted;
  for (const WindowInstance& w : s.windows) {
    if (!apps.insert(w.app).second) fail("duplicate window '" + w.app + "'");
    if (w.free_pose.has_value() == w.host.has_value())
      fail("window '" + w.app + "' must be either free or hosted");
    if (w.free_pose && !(w.free_pose->width > 0.0 && w.free_pose->height > 0.0))
      fail("window '" + w.app + "' has non-positive size");
    if (w.host) {
      if (s.find_occlusion(w.host->zone)) fail("window '" + w.app + "' hosted in an occlusion zone");
      const ZoneSpec* z = s.find_zone(w.host->zone);
      if (!z || w.host->cell < 0 || w.host->cell >= static_cast<int>(z->cells.size()))
        fail("window '" + w.app + "' hosted in a missing cell");
      if (z->cells[static_cast<std::size_t>(w.host->cell)].occupant != w.app)
        fail("cell occupant disagrees with window '" + w.app + "'");
      hosted.insert(*w.host);
    }
  }
  for (const ZoneSpec& z : s.zones)
    for (const Cell& c : z.cells)
      if (c.occupant && !hosted.count({z.id, c.index}))
        fail("cell " + z.id + "#" + std::to_string(c.index) + " names a missing window");

  std::vector<AngularFootprint> blockers;
  for (const ZoneSpec& o : s.occlusions) blockers.push_back(angular_footprint(o, s.pose));
  auto clear = [&](const PlanarRect& r, const std::string& what) {
    const AngularFootprint fp = angular_footprint(r, s.pose);
    for (const AngularFootprint& b : blockers)
      if (footprints_overlap(fp, b)) fail(what + " overlaps an occlusion-free zone");
  };
  for (const ZoneSpec& z : s.zones) clear(z.rect(), "zone '" + z.id + "'");
  for (const WindowInstance& w : s.windows)
    if (w.free_pose) clear(w.free_pose->rect(), "window '" + w.app + "'");
  check_time_ordered(s.log);
}

// ---- arrangement operations ---------------------------------------------------
//
// Each operation takes the current state by value-semantics copy and returns
// the successor; on error it throws and the caller's state is untouched.

namespace detail {

inline WorkspaceState next(const WorkspaceState& s) {
  WorkspaceState out = s;
  ++out.revision;
  return out;
}

inline FreePose slide_clear(const FreePose& pose, const std::vector<ZoneSpec>& occlusions,
                            const UserPose& user) {
  ZoneSpec probe = make_zone("~window", TemplateKind::kOneByOne, pose.width, pose.height,
                             pose.position, user);
  probe.orientation = pose.orientation;
  const ZoneSpec moved = resolve_intrusion(probe, occlusions, user);
  if (moved.position == probe.position) return pose;
  FreePose out = pose;
  out.position = moved.position;
  out.orientation = moved.orientation;
  return out;
}

inline void vacate(WorkspaceState& s, const WindowInstance& w) {
  if (w.host) s.zone(w.host->zone).cell(w.host->cell).occupant.reset();
}

}  // namespace detail

inline WorkspaceState add_window(const WorkspaceState& s, const std::string& app, FreePose pose) {
  if (app.empty()) throw Error(ErrorCode::kDomain, "window app id is empty");
  if (s.find_window(app)) throw Error(ErrorCode::kDuplicate, "window '" + app + "' exists");
  if (!(pose.width > 0.0 && pose.height > 0.0))
    throw Error(ErrorCode::kDomain, "window size must be positive");
  WorkspaceState out = detail::next(s);
  out.windows.push_back({app, detail::slide_clear(pose, s.occlusions, s.pose), std::nullopt,
                         Provenance::kUserPinned});
  return out;
}

inline WorkspaceState remove_window(const WorkspaceState& s, const std::string& app) {
  WorkspaceState out = detail::next(s);
  const WindowInstance w = out.window(app);
  detail::vacate(out, w);
  std::erase_if(out.windows, [&](const WindowInstance& x) { return x.app == app; });
  return out;
}

/// Snaps a window into a cell: it adopts the cell rectangle and the zone's
/// orientation. A zone found overlapping an occlusion is slid aside first.
inline WorkspaceState drag_window_in(const WorkspaceState& s, const std::string& app,
                                     const CellRef& target) {
  if (s.find_occlusion(target.zone))
    throw Error(ErrorCode::kIntrusion, "cannot drop into occlusion-free zone '" + target.zone + "'");
  WorkspaceState out = detail::next(s);
  ZoneSpec& zone = out.zone(target.zone);
  Cell& cell = zone.cell(target.cell);
  WindowInstance& w = out.window(app);
  if (cell.occupant && *cell.occupant != app)
    throw Error(ErrorCode::kOccupied, "cell " + target.zone + "#" + std::to_string(target.cell) +
                                          " holds '" + *cell.occupant + "'");
  detail::vacate(out, w);
  out.zone(target.zone).cell(target.cell).occupant = app;
  w.host = target;
  w.free_pose.reset();
  w.provenance = Provenance::kUserPinned;
  ZoneSpec& z = out.zone(target.zone);
  z = resolve_intrusion(z, out.occlusions, out.pose);
  return out;
}

/// Decouples a hosted window; it keeps the size and orientation it had in
/// the cell and floats at `position`.
inline WorkspaceState drag_window_out(const WorkspaceState& s, const std::string& app,
                                      const Vec3& position) {
  WorkspaceState out = detail::next(s);
  WindowInstance& w = out.window(app);
  if (!w.host) throw Error(ErrorCode::kDomain, "window '" + app + "' is not in a zone");
  if ((position - s.pose.position).norm() <= 0.0)
    throw Error(ErrorCode::kDomain, "window cannot be placed at the user position");
  const ZoneSpec& zone = *s.find_zone(w.host->zone);
  const Cell& cell = zone.cell(w.host->cell);
  FreePose pose{position, zone.orientation, cell.width, cell.height};
  detail::vacate(out, w);
  w.host.reset();
  w.free_pose = detail::slide_clear(pose, out.occlusions, out.pose);
  return out;
}

inline WorkspaceState create_zone(const WorkspaceState& s, ZoneSpec zone) {
  if (zone.is_occlusion())
    throw Error(ErrorCode::kDomain, "use create_occlusion for occlusion-free zones");
  if (zone.id.empty()) throw Error(ErrorCode::kDomain, "zone id is empty");
  if (s.find_zone(zone.id) || s.find_occlusion(zone.id))
    throw Error(ErrorCode::kDuplicate, "zone '" + zone.id + "' exists");
  for (Cell& c : zone.cells) c.occupant.reset();
  WorkspaceState out = detail::next(s);
  out.zones.push_back(resolve_intrusion(zone, s.occlusions, s.pose));
  return out;
}

/// Removes a zone; its windows float where their cells were.
inline WorkspaceState delete_zone(const WorkspaceState& s, const std::string& id) {
  WorkspaceState out = detail::next(s);
  const ZoneSpec zone = out.zone(id);
  for (WindowInstance& w : out.windows) {
    if (!w.host || w.host->zone != id) continue;
    const Cell& c = zone.cell(w.host->cell);
    w.free_pose = FreePose{zone.local_to_world(c.local_center()), zone.orientation, c.width, c.height};
    w.host.reset();
  }
  std::erase_if(out.zones, [&](const ZoneSpec& z) { return z.id == id; });
  return out;
}

/// Adds an occlusion-free zone. It may not overlap another one; zones and
/// free windows it covers are slid aside.
inline WorkspaceState create_occlusion(const WorkspaceState& s, ZoneSpec occlusion) {
  if (!occlusion.is_occlusion()) throw Error(ErrorCode::kDomain, "not an occlusion-free zone");
  if (occlusion.id.empty()) throw Error(ErrorCode::kDomain, "zone id is empty");
  if (s.find_zone(occlusion.id) || s.find_occlusion(occlusion.id))
    throw Error(ErrorCode::kDuplicate, "zone '" + occlusion.id + "' exists");
  const AngularFootprint fp = angular_footprint(occlusion, s.pose);
  for (const ZoneSpec& o : s.occlusions)
    if (footprints_overlap(fp, angular_footprint(o, s.pose)))
      throw Error(ErrorCode::kOverlap, "occlusion overlaps '" + o.id + "'");
  WorkspaceState out = detail::next(s);
  out.occlusions.push_back(std::move(occlusion));
  for (ZoneSpec& z : out.zones) z = resolve_intrusion(z, out.occlusions, out.pose);
  for (WindowInstance& w : out.windows)
    if (w.free_pose) w.free_pose = detail::slide_clear(*w.free_pose, out.occlusions, out.pose);
  return out;
}

inline WorkspaceState delete_occlusion(const WorkspaceState& s, const std::string& id) {
  if (!s.find_occlusion(id)) throw Error(ErrorCode::kNotFound, "no occlusion '" + id + "'");
  WorkspaceState out = detail::next(s);
  std::erase_if(out.occlusions, [&](const ZoneSpec& z) { return z.id == id; });
  return out;
}

struct InnerKnobOutcome {
  WorkspaceState state;
  bool clamped = false;
};

inline InnerKnobOutcome move_inner_knob(const WorkspaceState& s, const std::string& zone_id,
                                        KnobAxis axis, double value, double margin) {
  WorkspaceState out = detail::next(s);
  ZoneSpec& zone = out.zone(zone_id);
  KnobResult r = move_inner_knob(zone, axis, value, margin);
  zone = std::move(r.zone);
  return {std::move(out), r.clamped};
}

inline WorkspaceState move_outer_knob(const WorkspaceState& s, const std::string& zone_id,
                                      double width, double height) {
  WorkspaceState out = detail::next(s);
  ZoneSpec& zone = out.zone(zone_id);
  zone = resolve_intrusion(move_outer_knob(zone, width, height), out.occlusions, out.pose);
  return out;
}

/// Moves a zone (with its windows) and re-faces it toward the user.
inline WorkspaceState translate_zone(const WorkspaceState& s, const std::string& zone_id,
                                     const Vec3& position) {
  if ((position - s.pose.position).norm() <= 0.0)
    throw Error(ErrorCode::kDomain, "zone cannot be placed at the user position");
  WorkspaceState out = detail::next(s);
  ZoneSpec& zone = out.zone(zone_id);
  zone = resolve_intrusion(translate_zone(zone, position, out.pose), out.occlusions, out.pose);
  return out;
}

inline WorkspaceState set_zone_locked(const WorkspaceState& s, const std::string& zone_id,
                                      bool locked) {
  WorkspaceState out = detail::next(s);
  out.zone(zone_id).locked = locked;
  return out;
}

inline WorkspaceState ingest_events(const WorkspaceState& s,
                                    const std::vector<InteractionEvent>& events) {
  check_time_ordered(events, s.log.empty() ? std::nullopt : std::optional(s.log.back().timestamp));
  WorkspaceState out = detail::next(s);
  out.log.insert(out.log.end(), events.begin(), events.end());
  return out;
}

// ---- recommendation pipeline ---------------------------------------------------

/// Stage-1 prompt: cost rows for every app still to place, pinned context.
inline Json stage1_payload(const AssignmentProblem& pb, const std::vector<ZoneSpec>& zones,
                           const ReadabilityConfig& readability, const Goal& goal) {
  std::vector<CostMatrix> costs;
  for (const std::string& app : pb.order())
    costs.push_back(cost_matrix(app, pb.relevance, pb.pinned, pb.P, pb.context));
  return build_stage1_prompt(pb.relevance, zones, pb.pinned, costs, readability, goal);
}

struct PlannerConfig {
  Engine engine = Engine::kLlm;
  CostWeights weights;
  SizingConfig sizing;
  double smoothing = 1.0;
  RecommenderOptions recommender;
  double oracle_budget = kExhaustiveBudget;
  /// Multiplies raw cost signals; only used by invariance checks.
  double signal_scale = 1.0;
};

/// Relevance -> Stage 1 -> Stage 2 on a snapshot. Never mutates anything;
/// the caller decides whether and where to store the result.
inline Proposal plan_recommendation(const WorkspaceState& s, const Goal& goal,
                                    const std::vector<AppDescriptor>& catalog,
                                    const PlannerConfig& config, LanguageModelProvider* provider,
                                    std::string proposal_id = "proposal-1") {
  Proposal p;
  p.id = std::move(proposal_id);
  p.goal = goal;
  p.base_revision = s.revision;
  p.engine = std::string(to_string(config.engine));

  const RelevanceResult relevance = predict_relevance(goal, catalog, provider, config.recommender);
  p.relevance = relevance.relevance;
  p.relevance_fallback = relevance.fallback;
  p.warnings = relevance.warnings;

  std::vector<std::string> catalog_order;
  for (const AppDescriptor& a : catalog) catalog_order.push_back(a.id);
  const Assignment pinned = s.hosted_assignment();

  std::vector<std::string> apps;
  auto add_app = [&](const std::string& id) {
    if (std::find(apps.begin(), apps.end(), id) == apps.end()) apps.push_back(id);
  };
  for (const std::string& id : catalog_order)
    if (p.relevance.find(id) || pinned.find(id)) add_app(id);
  for (const RelevanceEntry& e : p.relevance.entries) add_app(e.app);
  for (const AssignmentEntry& e : pinned.entries) add_app(e.app);

  ReadabilityConfig readability = ReadabilityConfig::from_catalog(catalog, config.sizing.readability);

  AssignmentProblem pb;
  pb.relevance = p.relevance;
  pb.pinned = pinned;
  pb.catalog_order = catalog_order;
  pb.P = apps.empty() ? TransitionMatrix{} : estimate_transitions(s.log, apps, config.smoothing);
  pb.context = CostContext(s.zones, s.pose,
                           {config.weights, hand_travel_stats(s.log), config.signal_scale});

  Assignment full;
  switch (config.engine) {
    case Engine::kLlm: {
      if (provider == nullptr) {
        full = greedy_assign(pb);
        p.assignment_fallback = true;
        p.warnings.push_back("no provider configured; greedy assignment used");
        break;
      }
      const Json payload = stage1_payload(pb, s.zones, readability, goal);
      LlmAssignResult r = llm_assign(payload, *provider, pb, config.recommender);
      full = std::move(r.assignment);
      p.assignment_fallback = r.fallback;
      p.warnings.insert(p.warnings.end(), r.warnings.begin(), r.warnings.end());
      break;
    }
    case Engine::kGreedy:
      full = greedy_assign(pb);
      break;
    case Engine::kOracle:
      try {
        full = exhaustive_assign(pb, config.oracle_budget);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kTooLarge) throw;
        full = greedy_assign(pb);
        p.warnings.push_back("oracle refused the instance; greedy assignment used");
      }
      break;
  }
  p.total_cost = total_cost(full, pb);
  p.assignment.unassigned = full.unassigned;
  for (const AssignmentEntry& e : full.entries)
    if (e.provenance != Provenance::kUserPinned) p.assignment.entries.push_back(e);

  // Stage 2 per zone. Zones without new entries, and locked zones, keep
  // their layout.
  std::vector<ZoneSpec> sized;
  for (const ZoneSpec& z : s.zones) {
    const std::vector<ZoneOccupant> occupants = zone_occupants(z, full);
    const bool touched = std::any_of(p.assignment.entries.begin(), p.assignment.entries.end(),
                                     [&](const AssignmentEntry& e) { return e.cell.zone == z.id; });
    SizingResult r;
    r.zone_id = z.id;
    r.theta_star = z.theta;
    if (touched && !z.locked) {
      const LocalSignals signals = local_signals(z, s.pose);
      r = optimize_zone(z, occupants, p.relevance, pb.P, config.weights, signals, config.sizing);
      r = readability_scaleup(z, std::move(r), occupants, s.pose, readability);
      p.warnings.insert(p.warnings.end(), r.violations.begin(), r.violations.end());
    }
    sized.push_back(apply_sizing(z, r));
    p.sizing.push_back(std::move(r));
  }
  p.conflicts = occlusion_conflicts(sized, s.occlusions, s.pose);
  p.status = ProposalStatus::kReady;
  return p;
}

// ---- confirmation ---------------------------------------------------------------

enum class Decision { kAccept, kDecline, kOverride };

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::kAccept: return "accepted";
    case Decision::kDecline: return "declined";
    case Decision::kOverride: return "overridden";
  }
  return "?";
}

struct EntryDecision {
  std::string app;
  Decision decision = Decision::kAccept;
  std::optional<CellRef> target;  // required for overrides
};

struct Decisions {
  std::vector<EntryDecision> entries;
  std::map<std::string, Decision> zone_batch;  // accept or decline per zone
};

struct AcceptanceEntry {
  std::string app;
  CellRef proposed;
  Decision decision = Decision::kAccept;
  std::optional<CellRef> placed;
};

struct AcceptanceRecord {
  std::string proposal_id;
  std::vector<AcceptanceEntry> decisions;
  int apps_accepted = 0;
  int apps_rejected = 0;
  int apps_overridden = 0;
  int layouts_adjusted = 0;
  int reorderings = 0;
};

struct Resolution {
  WorkspaceState state;
  AcceptanceRecord record;
};

/// Applies the user's verdict on the pending proposal. Accepted entries become
/// hosted windows, overridden ones go to the user's chosen cell, declined ones
/// are dropped. A zone's sizing result is applied when at least one of its
/// proposed entries is accepted.
inline Resolution resolve_proposal(const WorkspaceState& s, const Decisions& decisions) {
  if (!s.pending || s.pending->status != ProposalStatus::kReady)
    throw Error(ErrorCode::kNoPending, "no ready proposal to resolve");
  const Proposal& p = *s.pending;

  std::map<std::string, const EntryDecision*> by_app;
  for (const EntryDecision& d : decisions.entries) {
    if (!p.assignment.find(d.app))
      throw Error(ErrorCode::kInvalidDocument, "decision for app '" + d.app + "' not in proposal");
    if (!by_app.emplace(d.app, &d).second)
      throw Error(ErrorCode::kInvalidDocument, "two decisions for app '" + d.app + "'");
    if (d.decision == Decision::kOverride && !d.target)
      throw Error(ErrorCode::kInvalidDocument, "override for '" + d.app + "' needs a target cell");
  }
  for (const auto& [zone, d] : decisions.zone_batch)
    if (d == Decision::kOverride)
      throw Error(ErrorCode::kInvalidDocument, "zone batch must accept or decline");

  Resolution res;
  res.record.proposal_id = p.id;
  for (const AssignmentEntry& e : p.assignment.entries) {
    AcceptanceEntry a{e.app, e.cell, Decision::kDecline, std::nullopt};
    if (auto it = by_app.find(e.app); it != by_app.end()) {
      a.decision = it->second->decision;
      if (a.decision == Decision::kOverride) a.placed = it->second->target;
    } else if (auto z = decisions.zone_batch.find(e.cell.zone); z != decisions.zone_batch.end()) {
      a.decision = z->second;
    } else {
      throw Error(ErrorCode::kIncompleteDecisions, "no decision for app '" + e.app + "'");
    }
    if (a.decision == Decision::kAccept) a.placed = e.cell;
    res.record.decisions.push_back(std::move(a));
  }

  WorkspaceState out = detail::next(s);
  out.pending.reset();
  std::set<std::string> resized;
  for (const AcceptanceEntry& a : res.record.decisions) {
    switch (a.decision) {
      case Decision::kAccept: ++res.record.apps_accepted; break;
      case Decision::kDecline: ++res.record.apps_rejected; break;
      case Decision::kOverride: ++res.record.apps_overridden; ++res.record.reorderings; break;
    }
    if (!a.placed) continue;
    if (out.find_occlusion(a.placed->zone))
      throw Error(ErrorCode::kIntrusion, "cannot place '" + a.app + "' in an occlusion zone");
    ZoneSpec* zone = out.find_zone(a.placed->zone);
    if (!zone)
      throw Error(a.decision == Decision::kOverride ? ErrorCode::kNotFound : ErrorCode::kStaleRevision,
                  "zone '" + a.placed->zone + "' no longer exists");
    Cell& cell = zone->cell(a.placed->cell);
    if (cell.occupant)
      throw Error(a.decision == Decision::kOverride ? ErrorCode::kOccupied : ErrorCode::kStaleRevision,
                  "cell " + a.placed->zone + "#" + std::to_string(a.placed->cell) + " is occupied");
    if (const WindowInstance* w = out.find_window(a.app); w && w->host)
      throw Error(ErrorCode::kStaleRevision, "'" + a.app + "' was placed meanwhile");
    cell.occupant = a.app;
    const Provenance prov =
        a.decision == Decision::kOverride ? Provenance::kUserOverridden : Provenance::kAiProposed;
    if (WindowInstance* w = out.find_window(a.app)) {
      w->free_pose.reset();
      w->host = *a.placed;
      w->provenance = prov;
    } else {
      out.windows.push_back({a.app, std::nullopt, *a.placed, prov});
    }
    if (a.decision == Decision::kAccept) resized.insert(a.placed->zone);
  }

  for (const std::string& zone_id : resized) {
    const SizingResult* r = p.sizing_for(zone_id);
    ZoneSpec& zone = out.zone(zone_id);
    if (!r || zone.locked) continue;
    if (r->theta_star == zone.theta && r->scale_factor == 1.0) continue;
    zone = resolve_intrusion(apply_sizing(zone, *r), out.occlusions, out.pose);
    ++res.record.layouts_adjusted;
  }
  res.state = std::move(out);
  return res;
}

/// Decisions that accept every entry of a proposal.
inline Decisions accept_all(const Proposal& p) {
  Decisions d;
  for (const AssignmentEntry& e : p.assignment.entries) d.entries.push_back({e.app, Decision::kAccept, {}});
  return d;
}

inline Decisions decline_all(const Proposal& p) {
  Decisions d;
  for (const AssignmentEntry& e : p.assignment.entries) d.entries.push_back({e.app, Decision::kDecline, {}});
  return d;
}

}  // namespace xrzone

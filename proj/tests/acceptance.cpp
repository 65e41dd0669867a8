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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

#include <chrono>
#include <cstdlib>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "xrzone/cli.hpp"
#include "xrzone/instance_gen.hpp"
#include "xrzone/service.hpp"

namespace xrzone {
namespace {

const std::string kData = XRZONE_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// ---- partition -------------------------------------------------------------------

struct Group {
  std::vector<int> cells;
};

// Pairs that meet at the vertical divider, left cell first.
std::vector<std::pair<int, int>> side_by_side(TemplateKind k) {
  switch (k) {
    case TemplateKind::kTwoByOneV: return {{0, 1}, {0, 2}};
    case TemplateKind::kTwoByOneH: return {{1, 2}};
    case TemplateKind::kOneByTwoV: return {{0, 1}};
    case TemplateKind::kTwoByTwo: return {{0, 1}, {3, 2}};
    default: return {};
  }
}

// Rows and columns per template, written out by hand.
void template_groups(TemplateKind k, std::vector<Group>& rows, std::vector<Group>& cols) {
  rows.clear();
  cols.clear();
  switch (k) {
    case TemplateKind::kOneByOne: break;
    case TemplateKind::kTwoByTwo:
      rows = {{{0, 1}}, {{3, 2}}};
      cols = {{{0, 3}}, {{1, 2}}};
      break;
    case TemplateKind::kOneByTwoV: rows = {{{0, 1}}}; break;
    case TemplateKind::kOneByTwoH: cols = {{{0, 1}}}; break;
    case TemplateKind::kTwoByOneV: cols = {{{1, 2}}}; break;
    case TemplateKind::kTwoByOneH: rows = {{{1, 2}}}; break;
    case TemplateKind::kOcclusionFree: break;
  }
}

Outcome partition_correctness() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> size(0.05, 5.0), frac(0.001, 0.999);
  Outcome o;
  int checked = 0;
  std::vector<Group> rows, cols;
  for (TemplateKind k : kCellTemplates) {
    template_groups(k, rows, cols);
    for (int t = 0; t < 1000; ++t, ++checked) {
      const double W = size(rng), H = size(rng);
      const ThetaParams th{frac(rng) * W, frac(rng) * H};
      const std::vector<Cell> cells = instantiate(k, W, H, th);
      std::string bad;
      if (static_cast<int>(cells.size()) != cell_count(k)) bad = "cell count";
      double sum = 0.0;
      for (const Cell& c : cells) {
        sum += c.area();
        if (!(c.width > 0 && c.height > 0)) bad = "degenerate cell";
        if (c.origin.x() < -1e-12 || c.origin.y() < -1e-12 || c.origin.x() + c.width > W * (1 + 1e-12) ||
            c.origin.y() + c.height > H * (1 + 1e-12))
          bad = "cell outside zone";
      }
      if (std::abs(sum - W * H) > 1e-9 * W * H) bad = "area sum " + fmt(sum, 17) + " vs " + fmt(W * H, 17);
      for (std::size_t a = 0; a < cells.size(); ++a)
        for (std::size_t b = 0; b < a; ++b) {
          const double ox = std::min(cells[a].origin.x() + cells[a].width, cells[b].origin.x() + cells[b].width) -
                            std::max(cells[a].origin.x(), cells[b].origin.x());
          const double oy = std::min(cells[a].origin.y() + cells[a].height, cells[b].origin.y() + cells[b].height) -
                            std::max(cells[a].origin.y(), cells[b].origin.y());
          if (ox > 1e-12 && oy > 1e-12) bad = "cells overlap";
        }
      for (const Group& g : rows) {
        const Cell& l = cells[static_cast<std::size_t>(g.cells[0])];
        const Cell& r = cells[static_cast<std::size_t>(g.cells[1])];
        if (l.origin.y() != r.origin.y() || l.height != r.height) bad = "row not shared";
      }
      for (const auto& [li, ri] : side_by_side(k)) {
        const Cell& l = cells[static_cast<std::size_t>(li)];
        const Cell& r = cells[static_cast<std::size_t>(ri)];
        if (std::abs(l.origin.x() + l.width - r.origin.x()) > 1e-12) bad = "divider not shared";
      }
      if (k == TemplateKind::kTwoByOneV && cells[0].height != H) bad = "left column not full height";
      if (k == TemplateKind::kTwoByOneH && cells[0].width != W) bad = "top row not full width";
      for (const Group& g : cols) {
        const Cell& u = cells[static_cast<std::size_t>(g.cells[0])];
        const Cell& d = cells[static_cast<std::size_t>(g.cells[1])];
        if (u.origin.x() != d.origin.x() || u.width != d.width) bad = "column not shared";
        if (std::abs(u.origin.y() + u.height - d.origin.y()) > 1e-12) bad = "column not adjacent";
      }
      if (!bad.empty() && o.pass) {
        o.pass = false;
        o.detail = std::string(to_string(k)) + " case " + std::to_string(t) + ": " + bad;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " layouts";
  return o;
}

// ---- stage-2 oracle ----------------------------------------------------------------

double snap40(double x) { return std::ldexp(std::round(std::ldexp(x, 40)), -40); }

struct Rect {
  double x, y, w, h;
};

std::vector<Rect> rects(TemplateKind k, double W, double H, double w0, double h0) {
  switch (k) {
    case TemplateKind::kOneByOne: return {{0, 0, W, H}};
    case TemplateKind::kOneByTwoV: return {{0, 0, w0, H}, {w0, 0, W - w0, H}};
    case TemplateKind::kOneByTwoH: return {{0, 0, W, h0}, {0, h0, W, H - h0}};
    case TemplateKind::kTwoByOneV: return {{0, 0, w0, H}, {w0, 0, W - w0, h0}, {w0, h0, W - w0, H - h0}};
    case TemplateKind::kTwoByOneH: return {{0, 0, W, h0}, {0, h0, w0, H - h0}, {w0, h0, W - w0, H - h0}};
    case TemplateKind::kTwoByTwo:
      return {{0, 0, w0, h0}, {w0, 0, W - w0, h0}, {w0, h0, W - w0, H - h0}, {0, h0, w0, H - h0}};
    case TemplateKind::kOcclusionFree: return {};
  }
  return {};
}

double center_distance(const Rect& a, const Rect& b) {
  return std::hypot((a.x + 0.5 * a.w) - (b.x + 0.5 * b.w), (a.y + 0.5 * a.h) - (b.y + 0.5 * b.h));
}

ThetaParams brute_force(const ZoneSpec& z, const std::vector<ZoneOccupant>& apps, const RelevanceSet& rel,
                        const TransitionMatrix& P, const CostWeights& w, const UserPose& pose,
                        const SizingConfig& cfg) {
  const bool vdiv = z.kind == TemplateKind::kTwoByTwo || z.kind == TemplateKind::kOneByTwoV ||
                    z.kind == TemplateKind::kTwoByOneV || z.kind == TemplateKind::kTwoByOneH;
  const bool hdiv = z.kind == TemplateKind::kTwoByTwo || z.kind == TemplateKind::kOneByTwoH ||
                    z.kind == TemplateKind::kTwoByOneV || z.kind == TemplateKind::kTwoByOneH;
  const std::vector<Rect> initial = rects(z.kind, z.width, z.height, z.theta.w0, z.theta.h0);
  const double diag = std::hypot(z.width, z.height);

  std::vector<double> turn;
  for (std::size_t c = 0; c < initial.size(); ++c) {
    const Vec3 dir = (z.cell_center(static_cast<int>(c)) - pose.position).normalized();
    turn.push_back(std::acos(std::clamp(dir.dot(pose.forward), -1.0, 1.0)));
  }
  const double lo = *std::min_element(turn.begin(), turn.end());
  const double hi = *std::max_element(turn.begin(), turn.end());
  for (double& t : turn) t = hi > lo ? snap40((t - lo) / (hi - lo)) : 0.0;

  auto r_of = [&](const std::string& app) { return rel.find(app).value_or(1.0); };
  auto axis = [&](bool div, double ext) {
    std::vector<double> v;
    if (!div) return std::vector<double>{0.5 * ext};
    const double a = cfg.omega_margin * ext, b = (1.0 - cfg.omega_margin) * ext;
    for (int i = 0; i < cfg.grid_resolution; ++i) v.push_back(a + (b - a) * i / (cfg.grid_resolution - 1));
    return v;
  };
  ThetaParams best_theta;
  double best = std::numeric_limits<double>::infinity();
  for (double w0 : axis(vdiv, z.width)) {
    for (double h0 : axis(hdiv, z.height)) {
      const std::vector<Rect> cells = rects(z.kind, z.width, z.height, w0, h0);
      double local = 0.0;
      for (const ZoneOccupant& i : apps)
        for (const ZoneOccupant& j : apps) {
          if (i.app == j.app) continue;
          const auto ci = static_cast<std::size_t>(i.cell), cj = static_cast<std::size_t>(j.cell);
          const double c = w.lambda_f * (center_distance(cells[ci], cells[cj]) / diag) +
                           w.lambda_h * turn[cj] + w.lambda_m * (center_distance(initial[ci], initial[cj]) / diag);
          local += r_of(i.app) * r_of(j.app) * P.at(i.app, j.app) * c;
        }
      double size = 0.0;
      for (const ZoneOccupant& i : apps) {
        const Rect& c = cells[static_cast<std::size_t>(i.cell)];
        size -= r_of(i.app) * (c.w * c.h) / (z.width * z.height);
      }
      const double v = local + w.lambda_s * size;
      if (v < best) {
        best = v;
        best_theta = {w0, h0};
      }
    }
  }
  return best_theta;
}

Outcome stage2_oracle() {
  Outcome o;
  int mismatches = 0;
  std::string first;
  for (int t = 0; t < 200; ++t) {
    std::mt19937_64 rng(5000 + static_cast<std::uint64_t>(t));
    UserPose pose;
    pose.position = Vec3(0, 1.6, 0);
    const ZoneSpec z = random_zones(rng, pose, 1).front();
    std::vector<std::string> ids;
    std::vector<ZoneOccupant> apps;
    RelevanceSet rel;
    std::uniform_int_distribution<int> coin(0, 3);
    for (int c = 0; c < static_cast<int>(z.cells.size()); ++c) {
      if (coin(rng) == 0) continue;  // empty cell
      const std::string id = "a" + std::to_string(c);
      ids.push_back(id);
      apps.push_back({id, c});
      // Some apps are pinned and carry no relevance entry.
      if (coin(rng) != 0) rel.entries.push_back({id, std::uniform_real_distribution<double>(0.0, 1.0)(rng)});
    }
    std::vector<InteractionEvent> log;
    if (!ids.empty())
      for (int k = 0; k < 30; ++k)
        log.push_back({double(k), EventKind::kFocus, ids[rng() % ids.size()], std::nullopt});
    const TransitionMatrix P = estimate_transitions(log, ids.empty() ? std::vector<std::string>{"none"} : ids);
    CostWeights w;
    if (t % 2) {
      w.lambda_f = 0.5;
      w.lambda_h = 0.2;
      w.lambda_m = 0.3;
      w.lambda_s = 2.0;
    }
    SizingConfig cfg;
    cfg.grid_resolution = 11 + 10 * (t % 4);
    const SizingResult got = optimize_zone(z, apps, rel, P, w, local_signals(z, pose), cfg);
    const ThetaParams want = brute_force(z, apps, rel, P, w, pose, cfg);
    if (!(got.theta_star == want)) {
      ++mismatches;
      if (first.empty())
        first = "instance " + std::to_string(t) + ": got (" + fmt(got.theta_star.w0, 17) + ", " +
                fmt(got.theta_star.h0, 17) + ") want (" + fmt(want.w0, 17) + ", " + fmt(want.h0, 17) + ")";
    }
  }
  o.pass = mismatches == 0;
  o.detail = "200 instances, " + std::to_string(mismatches) + " mismatches" + (first.empty() ? "" : "; " + first);
  return o;
}

// ---- assignment gap -------------------------------------------------------------------

Outcome assignment_gap() {
  Outcome o;
  double regret = 0.0, worst = 0.0;
  int violations = 0, zero_regret = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const AssignmentProblem pb = make_problem(random_instance(seed));
    const double g = total_cost(greedy_assign(pb), pb);
    const double e = total_cost(exhaustive_assign(pb), pb);
    // Both totals are summed in the same order; the slack only covers the
    // exhaustive search's incremental sums.
    if (e > g + 1e-12 * std::max(1.0, g)) ++violations;
    regret += g - e;
    worst = std::max(worst, g - e);
    if (g - e <= 0.0) ++zero_regret;
  }
  o.pass = violations == 0;
  o.detail = "1000 instances, exhaustive > greedy in " + std::to_string(violations) +
             "; mean greedy regret " + fmt(regret / 1000.0, 6) + ", max " + fmt(worst, 6) +
             ", greedy optimal in " + std::to_string(zero_regret);
  return o;
}

// ---- readability ----------------------------------------------------------------------

Outcome readability_guarantee() {
  Outcome o;
  int zones = 0, clamped = 0, unflagged = 0, cells = 0, failures = 0;
  std::string first;
  PlannerConfig pc;
  pc.engine = Engine::kGreedy;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const Instance inst = random_instance(10000 + seed);
    const Proposal p = plan_recommendation(inst.state, inst.relevance.goal, inst.catalog, pc, nullptr);
    const ReadabilityConfig rc = ReadabilityConfig::from_catalog(inst.catalog, pc.sizing.readability);
    Assignment full = inst.state.hosted_assignment();
    for (const AssignmentEntry& e : p.assignment.entries) full.entries.push_back(e);
    for (const ZoneSpec& z : inst.state.zones) {
      const SizingResult* r = p.sizing_for(z.id);
      if (!r || r->evaluated_points == 0) continue;  // untouched zone
      ++zones;
      if (r->scale_clamped) {
        ++clamped;
        if (r->violations.empty()) ++unflagged;
        continue;
      }
      const ZoneSpec sized = apply_sizing(z, *r);
      for (const AssignmentEntry& e : full.entries) {
        if (e.cell.zone != z.id) continue;
        ++cells;
        const Cell& c = sized.cell(e.cell.cell);
        const double d = (sized.cell_center(e.cell.cell) - inst.state.pose.position).norm();
        const double got = std::min(std::atan(c.width / d), std::atan(c.height / d));
        if (got < rc.alpha_min * rc.rows_for(e.app)) {
          ++failures;
          if (first.empty())
            first = "seed " + std::to_string(seed) + " " + e.app + " in " + z.id + ": " +
                    fmt(rad_to_deg(got), 9) + " deg < " + fmt(rad_to_deg(rc.alpha_min * rc.rows_for(e.app)), 9);
        }
      }
    }
  }
  o.pass = failures == 0 && unflagged == 0;
  o.detail = "500 workspaces, " + std::to_string(zones) + " sized zones, " + std::to_string(cells) +
             " occupied cells checked, " + std::to_string(failures) + " below threshold; " +
             std::to_string(clamped) + " zones hit the scale cap (flagged: " +
             std::to_string(clamped - unflagged) + ")" + (first.empty() ? "" : "; " + first);
  return o;
}

// ---- argmin invariance ----------------------------------------------------------------

bool same_cells(const Assignment& a, const Assignment& b) {
  if (a.entries.size() != b.entries.size() || a.unassigned != b.unassigned) return false;
  for (const AssignmentEntry& e : a.entries) {
    const AssignmentEntry* f = b.find(e.app);
    if (!f || !(f->cell == e.cell)) return false;
  }
  return true;
}

Outcome argmin_invariance() {
  Outcome o;
  int diffs = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = random_instance(20000 + seed);
    const AssignmentProblem base = make_problem(inst);
    const Assignment g = greedy_assign(base), e = exhaustive_assign(base);
    for (double k : {0.1, 1.0, 10.0, 1000.0}) {
      const AssignmentProblem pb = make_problem(inst, {}, k);
      if (!same_cells(g, greedy_assign(pb))) ++diffs;
      if (!same_cells(e, exhaustive_assign(pb))) ++diffs;
    }
  }
  o.pass = diffs == 0;
  o.detail = "100 instances x 4 scales x 2 engines, " + std::to_string(diffs) + " differences";
  return o;
}

// ---- golden ---------------------------------------------------------------------------

Outcome mock_golden() {
  Outcome o;
  const std::string golden = cli::read_file(kData + "/golden/demo_report.json");
  const cli::Loaded in = cli::load(kData + "/demo_scenario.json", {});
  const std::string a = cli::render(cli::run(in, {}), cli::Format::kJson);
  const std::string b = cli::render(cli::run(cli::load(kData + "/demo_scenario.json", {}), {}), cli::Format::kJson);
  const Report r = report_from_json(expect_envelope(a, "report").body);
  const bool shape = r.workspace.zones.size() == 4 && r.proposal.assignment.entries.size() == 8;
  o.pass = a == b && a == golden && shape;
  o.detail = std::string(a == b ? "repeatable" : "runs differ") + ", " +
             (a == golden ? "matches golden" : "differs from golden") + ", " +
             std::to_string(r.workspace.zones.size()) + " zones / " +
             std::to_string(r.proposal.assignment.entries.size()) + " apps";
  return o;
}

// ---- occlusion fuzz ---------------------------------------------------------------------

bool window_hits_occlusion(const WorkspaceState& s) {
  for (const WindowInstance& w : s.windows) {
    const AngularFootprint fp = angular_footprint(window_rect(s, w), s.pose);
    for (const ZoneSpec& o : s.occlusions)
      if (footprints_overlap(fp, angular_footprint(o, s.pose))) return true;
  }
  return false;
}

const char* const kOpNames[] = {"create_occlusion", "add_window",  "drag_in",     "drag_out",
                                "translate_zone",   "outer_knob",  "inner_knob",  "create_zone",
                                "remove_window",    "delete_zone"};

Outcome occlusion_fuzz() {
  Outcome o;
  long ops = 0, errors = 0, bad_errors = 0, hits = 0, invalid = 0;
  std::string first;
  InstanceOptions opt;
  opt.max_focus_events = 0;
  for (int seq = 0; seq < 10000; ++seq) {
    std::mt19937_64 rng(777000 + static_cast<std::uint64_t>(seq));
    const Instance inst = random_instance(static_cast<std::uint64_t>(seq), opt);
    WorkspaceSession session(inst.state);
    const UserPose pose = inst.state.pose;
    auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto point = [&] { return detail::bearing_point(pose, U(-kPi, kPi), U(-0.4, 0.4), U(1.0, 3.0)); };
    int next_id = 0;
    for (int step = 0; step < 12; ++step) {
      const WorkspaceState cur = session.snapshot();
      auto pick_zone = [&]() -> std::string {
        if (cur.zones.empty()) return "missing";
        return cur.zones[rng() % cur.zones.size()].id;
      };
      auto pick_app = [&]() -> std::string {
        if (cur.windows.empty() || rng() % 5 == 0) return "app" + std::to_string(rng() % 12 + 1);
        return cur.windows[rng() % cur.windows.size()].app;
      };
      std::function<WorkspaceState(const WorkspaceState&)> op;
      const auto kind = static_cast<std::size_t>(rng() % 10);
      switch (kind) {
        case 0: {
          const ZoneSpec occ = make_occlusion("occ" + std::to_string(next_id++), U(0.2, 1.2), U(0.2, 0.8), point(), pose);
          op = [occ](const WorkspaceState& s) { return create_occlusion(s, occ); };
          break;
        }
        case 1: {
          const std::string a = pick_app();
          const FreePose f{point(), Quat::Identity(), U(0.2, 0.8), U(0.2, 0.6)};
          op = [a, f](const WorkspaceState& s) { return add_window(s, a, f); };
          break;
        }
        case 2: {
          const std::string a = pick_app(), z = pick_zone();
          const int c = static_cast<int>(rng() % 4);
          op = [a, z, c](const WorkspaceState& s) { return drag_window_in(s, a, {z, c}); };
          break;
        }
        case 3: {
          const std::string a = pick_app();
          const Vec3 p = point();
          op = [a, p](const WorkspaceState& s) { return drag_window_out(s, a, p); };
          break;
        }
        case 4: {
          const std::string z = pick_zone();
          const Vec3 p = point();
          op = [z, p](const WorkspaceState& s) { return translate_zone(s, z, p); };
          break;
        }
        case 5: {
          const std::string z = pick_zone();
          const double w = U(0.2, 2.5), h = U(0.2, 1.5);
          op = [z, w, h](const WorkspaceState& s) { return move_outer_knob(s, z, w, h); };
          break;
        }
        case 6: {
          const std::string z = pick_zone();
          const double v = U(-0.5, 2.0);
          const KnobAxis axis = rng() % 2 ? KnobAxis::kVertical : KnobAxis::kHorizontal;
          op = [z, v, axis](const WorkspaceState& s) { return move_inner_knob(s, z, axis, v, 0.15).state; };
          break;
        }
        case 7: {
          const ZoneSpec z = make_zone("n" + std::to_string(next_id++), kCellTemplates[rng() % 6], U(0.3, 1.5),
                                       U(0.3, 1.0), point(), pose);
          op = [z](const WorkspaceState& s) { return create_zone(s, z); };
          break;
        }
        case 8: {
          const std::string a = pick_app();
          op = [a](const WorkspaceState& s) { return remove_window(s, a); };
          break;
        }
        default: {
          if (!cur.occlusions.empty() && rng() % 2) {
            const std::string id = cur.occlusions[rng() % cur.occlusions.size()].id;
            op = [id](const WorkspaceState& s) { return delete_occlusion(s, id); };
          } else {
            const std::string z = pick_zone();
            op = [z](const WorkspaceState& s) { return delete_zone(s, z); };
          }
        }
      }
      ++ops;
      const std::string before = canonical_dump(to_json(cur));
      try {
        const WorkspaceState next = session.mutate(cur.revision, op);
        if (next.revision != cur.revision + 1) ++bad_errors;
        if (window_hits_occlusion(next)) {
          ++hits;
          if (std::getenv("XRZONE_FUZZ_TRACE"))
            std::cerr << kOpNames[kind] << " seq " << seq << " step " << step << "\n"
                      << canonical_dump(to_json(cur)) << canonical_dump(to_json(next));
          if (first.empty())
            first = "sequence " + std::to_string(seq) + " step " + std::to_string(step) + " (" + kOpNames[kind] + ")";
        }
      } catch (const Error& e) {
        ++errors;
        // Commit-time validation failing means an op produced a broken state.
        if (e.code() == ErrorCode::kInvalidDocument) {
          ++invalid;
          if (first.empty()) first = "sequence " + std::to_string(seq) + ": " + e.what();
        }
        if (canonical_dump(to_json(session.snapshot())) != before) ++bad_errors;
      }
    }
  }
  o.pass = hits == 0 && bad_errors == 0 && invalid == 0;
  o.detail = "10000 sequences, " + std::to_string(ops) + " ops, " + std::to_string(errors) + " rejected; " +
             std::to_string(hits) + " occlusion overlaps, " + std::to_string(invalid) + " invalid states, " +
             std::to_string(bad_errors) + " errors that changed state" + (first.empty() ? "" : "; " + first);
  return o;
}

// ---- service round-trip -------------------------------------------------------------------

Outcome service_round_trip() {
  Outcome o;
  const cli::Loaded in = cli::load(kData + "/demo_scenario.json", {});
  const Report report = cli::run(in, {});
  WorkspaceState with_pending = in.scenario.workspace;
  with_pending.pending = report.proposal;
  const Scenario raw = scenario_from_json(
      expect_envelope(cli::read_file(kData + "/demo_scenario.json"), "scenario").body);
  Decisions mixed = accept_all(report.proposal);
  mixed.entries[1].decision = Decision::kDecline;
  mixed.entries[2] = {mixed.entries[2].app, Decision::kOverride, CellRef{"top", 0}};
  mixed.zone_batch["left"] = Decision::kAccept;
  const cli::CompareTable table = cli::compare(in, {"greedy", "oracle"}, 3, 1, {});

  using Typed = std::function<Json(const Json&)>;
  const Typed same = [](const Json& j) { return j; };
  struct Doc {
    std::string kind;
    Json body;
    Typed reparse;
  };
  const std::vector<Doc> docs = {
      {"workspace_state", to_json(with_pending), [](const Json& j) { return to_json(state_from_json(j)); }},
      {"proposal", to_json(report.proposal), [](const Json& j) { return to_json(proposal_from_json(j, "")); }},
      {"sizing_result", to_json(report.proposal.sizing[0]), [](const Json& j) { return to_json(sizing_from_json(j, "")); }},
      {"acceptance_record", to_json(report.acceptance), [](const Json& j) { return to_json(acceptance_from_json(j)); }},
      {"decisions", to_json(mixed), [](const Json& j) { return to_json(decisions_from_json(j)); }},
      {"report", to_json(report), [](const Json& j) { return to_json(report_from_json(j)); }},
      {"scenario", to_json(raw), [](const Json& j) { return to_json(scenario_from_json(j)); }},
      {"config", to_json(in.config), [](const Json& j) { return to_json(config_from_json(j)); }},
      {"event_batch", to_json(in.scenario.workspace.log), [](const Json& j) { return to_json(events_from_json(j)); }},
      {"op", Json{{"op", "translate_zone"}, {"zone", "main"}, {"position", {0.1, 1.6, 2.0}}, {"expected_revision", 3}}, same},
      {"recommend", Json{{"goal", {{"text", "coding a web game"}, {"source", "typed"}}}, {"engine", "greedy"}}, same},
      {"error", error_body(Error(ErrorCode::kStaleRevision, "field 'expected_revision': stale")), same},
      {"session", Json{{"id", "ws-1"}, {"revision", 0}}, same},
      {"compare_table", cli::to_json(table), same},
      {"resolution", Json{{"acceptance", to_json(report.acceptance)}, {"state", to_json(report.workspace)}},
       [](const Json& j) {
         return Json{{"acceptance", to_json(acceptance_from_json(j.at("acceptance")))},
                     {"state", to_json(state_from_json(j.at("state")))}};
       }},
      {"op_result", Json{{"op", "undo"}, {"revision", 4}, {"clamped", false}, {"state", to_json(report.workspace)}},
       [](const Json& j) {
         Json out = j;
         out["state"] = to_json(state_from_json(j.at("state")));
         return out;
       }},
  };
  std::vector<std::string> broken;
  std::size_t covered = 0;
  for (const std::string& kind : document_kinds()) {
    const auto it = std::find_if(docs.begin(), docs.end(), [&](const Doc& d) { return d.kind == kind; });
    if (it == docs.end()) {
      broken.push_back(kind + " (no sample)");
      continue;
    }
    ++covered;
    try {
      const std::string first = wrap(kind, it->body, "rt-" + kind);
      const Envelope e = expect_envelope(first, kind);
      const std::string second = wrap(kind, it->reparse(e.body), e.request_id);
      if (first != second) broken.push_back(kind);
    } catch (const std::exception& e) {
      broken.push_back(kind + " (" + e.what() + ")");
    }
  }

  // Recommend while a proposal is being computed.
  auto slow = MockProvider::from_file(kData + "/mock_fixtures.json");
  slow->set_latency(std::chrono::milliseconds(500));
  Service svc(EngineConfig{}, in.scenario.catalog, slow);
  const HttpResponse created = svc.handle("POST", "/v1/workspaces", wrap("workspace_state", to_json(in.scenario.workspace)));
  const std::string id = expect_envelope(created.body, "session").body.at("id").get<std::string>();
  const std::string url = "/v1/workspaces/" + id;
  const std::string goal = wrap("recommend", Json{{"goal", "coding a web game"}});
  const HttpResponse accepted = svc.handle("POST", url + "/recommend?async=1", goal);
  const std::string before = svc.handle("GET", url, "").body;
  const HttpResponse again = svc.handle("POST", url + "/recommend", goal);
  const std::string after = svc.handle("GET", url, "").body;
  svc.session(id)->wait();
  const bool conflict = created.status == 201 && accepted.status == 202 && again.status == 409 && before == after;

  o.pass = broken.empty() && conflict && covered == document_kinds().size();
  std::string list;
  for (const std::string& b : broken) list += (list.empty() ? "" : ", ") + b;
  o.detail = std::to_string(covered) + "/" + std::to_string(document_kinds().size()) + " document kinds round-trip" +
             (list.empty() ? "" : " (broken: " + list + ")") + "; recommend while pending -> " +
             std::to_string(again.status) + (before == after ? ", state unchanged" : ", STATE CHANGED");
  return o;
}

}  // namespace
}  // namespace xrzone

int main() {
  using namespace xrzone;
  struct Criterion {
    const char* name;
    double budget_s;  // 0 = no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"partition_correctness", 1.0, partition_correctness},
      {"stage2_oracle_equivalence", 30.0, stage2_oracle},
      {"assignment_optimality_gap", 300.0, assignment_gap},
      {"readability_guarantee", 0.0, readability_guarantee},
      {"argmin_invariance", 0.0, argmin_invariance},
      {"mock_end_to_end_golden", 0.0, mock_golden},
      {"occlusion_safety", 0.0, occlusion_fuzz},
      {"service_round_trip", 0.0, service_round_trip},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = seconds_since(t0);
    std::string timing = fmt(s) + " s";
    if (c.budget_s > 0.0) {
      timing += " (limit " + fmt(c.budget_s) + " s)";
      if (s >= c.budget_s) o.pass = false;
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " [" << timing << "] " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

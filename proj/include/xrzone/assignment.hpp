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
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "xrzone/costmodel.hpp"
#include "xrzone/errors.hpp"
#include "xrzone/geometry.hpp"
#include "xrzone/layout.hpp"
#include "xrzone/recommender.hpp"
#include "xrzone/telemetry.hpp"
#include "xrzone/types.hpp"

namespace xrzone {

struct Violation {
  std::string rule;
  std::string subject;
  std::string detail;
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  bool has(std::string_view rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.rule == rule; });
  }
};

/// Rule ids that make an entry unplaceable, as opposed to the readability
/// rule which the sizing stage repairs by scaling.
inline bool is_structural_rule(std::string_view rule) { return rule != "readability"; }

/// Distance from the user to the cell center and the cell's angular size.
inline AngularSize cell_angular_size(const ZoneSpec& zone, int cell, const UserPose& pose) {
  const Cell& c = zone.cell(cell);
  const double d = (zone.cell_center(cell) - pose.position).norm();
  return angular_size(c.width, c.height, d);
}

inline FeasibilityReport check_feasibility(const Assignment& assignment,
                                           const std::vector<ZoneSpec>& zones,
                                           const UserPose& pose,
                                           const ReadabilityConfig& readability) {
  FeasibilityReport report;
  auto violate = [&](std::string rule, std::string subject, std::string detail) {
    report.violations.push_back({std::move(rule), std::move(subject), std::move(detail)});
  };

  for (const ZoneSpec& z : zones) {
    if (z.is_occlusion()) continue;
    const bool w_bad = has_vertical_divider(z.kind) && !(z.theta.w0 > 0.0 && z.theta.w0 < z.width);
    const bool h_bad = has_horizontal_divider(z.kind) && !(z.theta.h0 > 0.0 && z.theta.h0 < z.height);
    if (w_bad || h_bad) violate("theta_outside_zone", z.id, "split point not inside the zone");
  }

  std::map<CellRef, int> cell_use;
  std::map<std::string, int> zone_use;
  std::set<std::string> apps;
  for (const AssignmentEntry& e : assignment.entries) {
    const std::string subject = e.app + "@" + e.cell.zone + "#" + std::to_string(e.cell.cell);
    if (!apps.insert(e.app).second) violate("duplicate_app", e.app, "app assigned twice");
    auto zit = std::find_if(zones.begin(), zones.end(),
                            [&](const ZoneSpec& z) { return z.id == e.cell.zone; });
    if (zit == zones.end() || e.cell.cell < 0 ||
        e.cell.cell >= static_cast<int>(zit->cells.size())) {
      violate(zit != zones.end() && zit->is_occlusion() ? "occlusion_zone" : "unknown_cell",
              subject, "cell does not exist");
      continue;
    }
    if (++cell_use[e.cell] == 2) violate("duplicate_cell", subject, "cell holds two apps");
    ++zone_use[e.cell.zone];

    const AngularSize size = cell_angular_size(*zit, e.cell.cell, pose);
    const double need = readability.required_angle(e.app);
    if (size.min() < need)
      violate("readability", subject,
              "smallest angular dimension " + format_number(rad_to_deg(size.min())) +
                  " deg below required " + format_number(rad_to_deg(need)) + " deg");
  }
  for (const auto& [zone, count] : zone_use) {
    const ZoneSpec& z = find_zone(zones, zone);
    if (count > static_cast<int>(z.cells.size()))
      violate("zone_capacity", zone, "more apps than cells");
  }
  return report;
}

// ---- planning problem --------------------------------------------------------

/// Apps to place, highest relevance first. Ties keep catalog order (or
/// relevance-entry order when no catalog order is supplied). Apps already
/// pinned are skipped.
inline std::vector<std::string> placement_order(const RelevanceSet& relevance,
                                                const Assignment& pinned,
                                                const std::vector<std::string>& catalog_order = {}) {
  std::vector<std::pair<std::size_t, const RelevanceEntry*>> ranked;
  for (std::size_t i = 0; i < relevance.entries.size(); ++i) {
    const RelevanceEntry& e = relevance.entries[i];
    if (pinned.find(e.app)) continue;
    std::size_t rank = i;
    if (!catalog_order.empty()) {
      auto it = std::find(catalog_order.begin(), catalog_order.end(), e.app);
      rank = static_cast<std::size_t>(it - catalog_order.begin());
    }
    ranked.emplace_back(rank, &e);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second->r != b.second->r) return a.second->r > b.second->r;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (const auto& [rank, e] : ranked) out.push_back(e->app);
  return out;
}

/// Shared inputs of the Stage-1 engines.
struct AssignmentProblem {
  RelevanceSet relevance;
  Assignment pinned;
  TransitionMatrix P;
  CostContext context;
  std::vector<std::string> catalog_order;

  std::vector<std::string> order() const {
    return placement_order(relevance, pinned, catalog_order);
  }

  /// Cells not held by pinned apps, ordered by (zone id, cell index).
  std::vector<std::size_t> free_cells() const {
    std::vector<bool> taken(context.cells().size(), false);
    for (const AssignmentEntry& e : pinned.entries) taken[context.require(e.cell)] = true;
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < taken.size(); ++c)
      if (!taken[c]) out.push_back(c);
    std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
      return context.cells()[a] < context.cells()[b];
    });
    return out;
  }
};

namespace detail {

struct PairTerms {
  double r_i, r_l, p_il, p_li;
};

inline PairTerms terms(const AssignmentProblem& pb, const std::string& i, const std::string& l) {
  return {relevance_or_pinned(pb.relevance, i), relevance_or_pinned(pb.relevance, l),
          pb.P.at(i, l), pb.P.at(l, i)};
}

inline double pair(const AssignmentProblem& pb, const PairTerms& t, std::size_t ci, std::size_t cl) {
  return pair_cost(t.r_i, t.r_l, t.p_il, t.p_li, pb.context, ci, cl);
}

}  // namespace detail

/// Order-free objective: sum over placed (non-pinned) apps of C[i][sigma(i)]
/// with every other assigned app as context. Each placed app contributes its
/// pinned pairs once and each earlier placed app twice, since both apps see
/// each other. Terms are accumulated in entry order.
inline double total_cost(const Assignment& a, const AssignmentProblem& pb) {
  std::vector<const AssignmentEntry*> pinned;
  std::vector<const AssignmentEntry*> placed;
  for (const AssignmentEntry& e : a.entries)
    (e.provenance == Provenance::kUserPinned ? pinned : placed).push_back(&e);
  double total = 0.0;
  for (std::size_t k = 0; k < placed.size(); ++k) {
    const std::size_t ck = pb.context.require(placed[k]->cell);
    double delta = 0.0;
    for (const AssignmentEntry* p : pinned)
      delta += detail::pair(pb, detail::terms(pb, placed[k]->app, p->app), ck,
                            pb.context.require(p->cell));
    for (std::size_t j = 0; j < k; ++j)
      delta += 2.0 * detail::pair(pb, detail::terms(pb, placed[k]->app, placed[j]->app), ck,
                                  pb.context.require(placed[j]->cell));
    total += delta;
  }
  return total;
}

/// Sequential engine: apps in placement order each take the empty cell with
/// the lowest current C (ties: lowest zone id, then cell index).
inline Assignment greedy_assign(const AssignmentProblem& pb) {
  Assignment out = pb.pinned;
  std::size_t free = pb.free_cells().size();
  for (const std::string& app : pb.order()) {
    if (free == 0) {
      out.unassigned.push_back(app);
      continue;
    }
    const CostMatrix c = cost_matrix(app, pb.relevance, out, pb.P, pb.context);
    const CostEntry* best = c.argmin();
    out.add(app, best->cell, Provenance::kAiProposed);
    --free;
  }
  return out;
}

inline constexpr double kExhaustiveBudget = 1e7;

/// Number of injective placements of `apps` apps into `cells` cells.
inline double placement_count(std::size_t cells, std::size_t apps) {
  double n = 1.0;
  for (std::size_t k = 0; k < apps; ++k) n *= static_cast<double>(cells - k);
  return n;
}

/// Exact minimizer of total_cost over every injective placement of the top
/// min(#apps, #free cells) apps. Depth-first in lexicographic cell order with
/// pruning on the running (monotone) partial sum; the first optimum in that
/// order wins ties, as a full enumeration would.
inline Assignment exhaustive_assign(const AssignmentProblem& pb,
                                    double budget = kExhaustiveBudget) {
  const std::vector<std::string> order = pb.order();
  const std::vector<std::size_t> free = pb.free_cells();
  const std::size_t m = std::min(order.size(), free.size());
  if (placement_count(free.size(), m) > budget)
    throw Error(ErrorCode::kTooLarge, "exhaustive search exceeds the evaluation budget");

  // Pinned context and pair terms, precomputed per app.
  std::vector<std::size_t> pinned_cells;
  for (const AssignmentEntry& e : pb.pinned.entries) pinned_cells.push_back(pb.context.require(e.cell));
  std::vector<std::vector<detail::PairTerms>> pin_terms(m), app_terms(m);
  for (std::size_t k = 0; k < m; ++k) {
    for (const AssignmentEntry& e : pb.pinned.entries)
      pin_terms[k].push_back(detail::terms(pb, order[k], e.app));
    for (std::size_t j = 0; j < k; ++j) app_terms[k].push_back(detail::terms(pb, order[k], order[j]));
  }

  std::vector<std::size_t> current(m), best_cells;
  std::vector<bool> used(free.size(), false);
  double best = std::numeric_limits<double>::infinity();

  auto dfs = [&](auto&& self, std::size_t k, double partial) -> void {
    if (k == m) {
      if (partial < best) {
        best = partial;
        best_cells = current;
      }
      return;
    }
    for (std::size_t f = 0; f < free.size(); ++f) {
      if (used[f]) continue;
      const std::size_t ck = free[f];
      double delta = 0.0;
      for (std::size_t p = 0; p < pinned_cells.size(); ++p)
        delta += detail::pair(pb, pin_terms[k][p], ck, pinned_cells[p]);
      for (std::size_t j = 0; j < k; ++j)
        delta += 2.0 * detail::pair(pb, app_terms[k][j], ck, current[j]);
      const double next = partial + delta;
      if (next >= best) continue;
      used[f] = true;
      current[k] = ck;
      self(self, k + 1, next);
      used[f] = false;
    }
  };
  dfs(dfs, 0, 0.0);

  Assignment out = pb.pinned;
  for (std::size_t k = 0; k < m; ++k)
    out.add(order[k], pb.context.cells()[best_cells[k]], Provenance::kAiProposed);
  for (std::size_t k = m; k < order.size(); ++k) out.unassigned.push_back(order[k]);
  return out;
}

struct LlmAssignResult {
  Assignment assignment;
  bool fallback = false;
  std::vector<std::string> warnings;
};

/// Stage-1 through the language model. Entries that name unknown apps or
/// cells, reuse a cell or an app, or land on a pinned cell are dropped; the
/// remaining apps are backfilled greedily. Provider failure falls back to
/// the greedy engine entirely.
inline LlmAssignResult llm_assign(const Json& payload, LanguageModelProvider& provider,
                                  const AssignmentProblem& pb,
                                  const RecommenderOptions& options = {}) {
  LlmAssignResult out;
  std::vector<ProposedCell> proposed;
  try {
    const std::string reply =
        complete_with_retry(provider, canonical_dump(payload, -1), options.timeout, options.retries);
    proposed = parse_assignment_response(reply);
  } catch (const Error& e) {
    if (!options.allow_fallback) throw;
    out.assignment = greedy_assign(pb);
    out.fallback = true;
    out.warnings.push_back(std::string("assignment fallback: ") + e.what());
    return out;
  }

  const std::vector<std::string> order = pb.order();
  Assignment partial = pb.pinned;
  std::map<std::string, CellRef> accepted;
  for (const ProposedCell& p : proposed) {
    const std::string subject = p.app + "@" + p.cell.zone + "#" + std::to_string(p.cell.cell);
    if (std::find(order.begin(), order.end(), p.app) == order.end()) {
      out.warnings.push_back("dropped " + subject + ": app not recommended or already placed");
      continue;
    }
    if (accepted.count(p.app)) {
      out.warnings.push_back("dropped " + subject + ": app assigned twice");
      continue;
    }
    if (!pb.context.index_of(p.cell)) {
      out.warnings.push_back("dropped " + subject + ": no such cell");
      continue;
    }
    if (partial.occupant(p.cell)) {
      out.warnings.push_back("dropped " + subject + ": cell already occupied");
      continue;
    }
    partial.add(p.app, p.cell, Provenance::kAiProposed);
    accepted.emplace(p.app, p.cell);
  }

  // Backfill in placement order with the accepted entries as context.
  std::size_t free = pb.free_cells().size() - accepted.size();
  std::map<std::string, CellRef> placed = accepted;
  for (const std::string& app : order) {
    if (placed.count(app)) continue;
    if (free == 0) continue;
    const CostMatrix c = cost_matrix(app, pb.relevance, partial, pb.P, pb.context);
    const CostEntry* best = c.argmin();
    partial.add(app, best->cell, Provenance::kAiProposed);
    placed.emplace(app, best->cell);
    --free;
  }

  out.assignment = pb.pinned;
  for (const std::string& app : order) {
    auto it = placed.find(app);
    if (it == placed.end()) out.assignment.unassigned.push_back(app);
    else out.assignment.add(app, it->second, Provenance::kAiProposed);
  }
  return out;
}

}  // namespace xrzone

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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "xrzone/assignment.hpp"
#include "xrzone/workspace.hpp"

namespace xrzone {

/// Random Stage-1 instance: zones around the user, a relevance set, a few
/// pinned windows and a focus log.
struct Instance {
  WorkspaceState state;
  std::vector<AppDescriptor> catalog;
  RelevanceSet relevance;
};

struct InstanceOptions {
  int min_zones = 2;
  int max_zones = 5;
  int min_apps = 4;
  int max_apps = 10;
  double max_pinned_fraction = 0.25;
  int max_focus_events = 60;
  bool pointer_events = true;
  /// Instances whose exhaustive search would exceed this are redrawn.
  double placement_budget = kExhaustiveBudget;
};

namespace detail {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Vec3 bearing_point(const UserPose& pose, double azimuth, double elevation, double distance) {
  const Vec3 fwd = pose.forward;
  const Vec3 right = world_up().cross(fwd).normalized();
  const Vec3 dir = std::cos(elevation) * (std::cos(azimuth) * fwd + std::sin(azimuth) * right) +
                   std::sin(elevation) * world_up();
  return pose.position + distance * dir;
}

}  // namespace detail

/// Zones only, in distinct azimuth sectors so they never coincide.
inline std::vector<ZoneSpec> random_zones(std::mt19937_64& rng, const UserPose& pose, int count,
                                          double margin = 0.15) {
  std::vector<ZoneSpec> zones;
  const double sector = 2.0 * kPi / 5.0;
  std::vector<int> sectors = {0, 1, 2, 3, 4};
  std::shuffle(sectors.begin(), sectors.end(), rng);
  for (int z = 0; z < count; ++z) {
    const TemplateKind kind = kCellTemplates[static_cast<std::size_t>(detail::uniform_int(rng, 0, 5))];
    const double W = detail::uniform(rng, 0.4, 1.6);
    const double H = detail::uniform(rng, 0.3, 1.0);
    const double az = (sectors[static_cast<std::size_t>(z)] - 2) * sector + detail::uniform(rng, -0.3, 0.3);
    const double el = detail::uniform(rng, -0.35, 0.35);
    const Vec3 pos = detail::bearing_point(pose, az, el, detail::uniform(rng, 1.2, 3.0));
    const ThetaParams theta{detail::uniform(rng, margin * W, (1.0 - margin) * W),
                            detail::uniform(rng, margin * H, (1.0 - margin) * H)};
    zones.push_back(make_zone("z" + std::to_string(z + 1), kind, W, H, pos, pose, theta));
  }
  return zones;
}

inline Instance random_instance(std::uint64_t seed, const InstanceOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  for (;;) {
    Instance inst;
    WorkspaceState& s = inst.state;
    s.id = "instance-" + std::to_string(seed);
    s.pose.position = Vec3(0.0, detail::uniform(rng, 1.2, 1.8), 0.0);
    const double yaw = detail::uniform(rng, -kPi, kPi);
    s.pose.forward = Vec3(std::sin(yaw), 0.0, std::cos(yaw));
    s.zones = random_zones(rng, s.pose, detail::uniform_int(rng, opt.min_zones, opt.max_zones));

    const int n_apps = detail::uniform_int(rng, opt.min_apps, opt.max_apps);
    for (int a = 0; a < n_apps; ++a) {
      AppDescriptor app;
      app.id = "app" + std::to_string(a + 1);
      app.name = "App " + std::to_string(a + 1);
      app.min_rows = detail::uniform_int(rng, 10, 30);
      inst.catalog.push_back(app);
    }

    // A few apps are already pinned in random cells.
    std::vector<CellRef> cells;
    for (const ZoneSpec& z : s.zones)
      for (const Cell& c : z.cells) cells.push_back({z.id, c.index});
    std::shuffle(cells.begin(), cells.end(), rng);
    const int max_pinned = static_cast<int>(opt.max_pinned_fraction * n_apps);
    const int n_pinned = std::min(detail::uniform_int(rng, 0, max_pinned), static_cast<int>(cells.size()) - 1);
    for (int k = 0; k < n_pinned; ++k) {
      const std::string& app = inst.catalog[static_cast<std::size_t>(n_apps - 1 - k)].id;
      s.zone(cells[static_cast<std::size_t>(k)].zone).cell(cells[static_cast<std::size_t>(k)].cell).occupant = app;
      s.windows.push_back({app, std::nullopt, cells[static_cast<std::size_t>(k)], Provenance::kUserPinned});
    }

    inst.relevance.goal.text = "random goal " + std::to_string(seed);
    for (int a = 0; a < n_apps - n_pinned; ++a)
      inst.relevance.entries.push_back(
          {inst.catalog[static_cast<std::size_t>(a)].id, std::round(detail::uniform(rng, 0.05, 1.0) * 20.0) / 20.0});

    const int n_focus = detail::uniform_int(rng, 0, opt.max_focus_events);
    double t = 0.0;
    for (int k = 0; k < n_focus; ++k) {
      t += detail::uniform(rng, 0.1, 5.0);
      if (opt.pointer_events) {
        const Vec3 hand = s.pose.position + Vec3(detail::uniform(rng, -0.4, 0.4), -0.3, 0.4);
        s.log.push_back({t, EventKind::kPointerDown, std::nullopt, hand});
        const Vec3 hand2 = hand + Vec3(detail::uniform(rng, -0.3, 0.3), detail::uniform(rng, -0.2, 0.2), 0.0);
        s.log.push_back({t + 0.05, EventKind::kPointerUp, std::nullopt, hand2});
      }
      const std::string& app = inst.catalog[static_cast<std::size_t>(detail::uniform_int(rng, 0, n_apps - 1))].id;
      s.log.push_back({t + 0.1, EventKind::kFocus, app, std::nullopt});
    }

    const std::size_t free = cells.size() - static_cast<std::size_t>(n_pinned);
    const std::size_t m = std::min(free, inst.relevance.entries.size());
    if (placement_count(free, m) <= opt.placement_budget) return inst;
  }
}

/// Stage-1 problem for an instance. All catalog apps enter the transition
/// matrix.
inline AssignmentProblem make_problem(const Instance& inst, const CostWeights& weights = {},
                                      double signal_scale = 1.0, double smoothing = 1.0) {
  AssignmentProblem pb;
  pb.relevance = inst.relevance;
  pb.pinned = inst.state.hosted_assignment();
  std::vector<std::string> apps;
  for (const AppDescriptor& a : inst.catalog) apps.push_back(a.id);
  pb.catalog_order = apps;
  pb.P = estimate_transitions(inst.state.log, apps, smoothing);
  pb.context = CostContext(inst.state.zones, inst.state.pose,
                           {weights, hand_travel_stats(inst.state.log), signal_scale});
  return pb;
}

}  // namespace xrzone

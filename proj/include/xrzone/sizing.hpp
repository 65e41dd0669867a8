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
#include <string>
#include <utility>
#include <vector>

#include "xrzone/assignment.hpp"
#include "xrzone/costmodel.hpp"
#include "xrzone/errors.hpp"
#include "xrzone/geometry.hpp"
#include "xrzone/layout.hpp"
#include "xrzone/telemetry.hpp"
#include "xrzone/types.hpp"

namespace xrzone {

struct SizingConfig {
  double omega_margin = 0.15;
  int grid_resolution = 41;
  ReadabilityConfig readability;

  void validate() const {
    if (!(omega_margin > 0.0 && omega_margin < 0.5))
      throw Error(ErrorCode::kDomain, "omega_margin must lie in (0, 0.5)");
    if (grid_resolution < 3) throw Error(ErrorCode::kDomain, "grid_resolution must be >= 3");
    if (!(readability.alpha_min > 0.0)) throw Error(ErrorCode::kDomain, "alpha_min must be > 0");
    if (!(readability.max_scale >= 1.0)) throw Error(ErrorCode::kDomain, "max_scale must be >= 1");
  }
};

struct SizingResult {
  std::string zone_id;
  ThetaParams theta_star;     // before scale-up
  double scale_factor = 1.0;
  double objective_value = 0.0;
  std::size_t evaluated_points = 0;
  bool scale_clamped = false;
  std::vector<std::string> violations;
};

/// App placed in a zone, by cell index.
struct ZoneOccupant {
  std::string app;
  int cell = 0;
};

/// Occupants of `zone` according to `assignment`.
inline std::vector<ZoneOccupant> zone_occupants(const ZoneSpec& zone, const Assignment& assignment) {
  std::vector<ZoneOccupant> out;
  for (const AssignmentEntry& e : assignment.entries)
    if (e.cell.zone == zone.id) out.push_back({e.app, e.cell.cell});
  return out;
}

inline double cell_area(const ZoneSpec& zone, int index, const ThetaParams& theta) {
  const std::vector<Cell> cells = instantiate(zone.kind, zone.width, zone.height, theta);
  if (index < 0 || index >= static_cast<int>(cells.size()))
    throw Error(ErrorCode::kNotFound, "no cell " + std::to_string(index) + " in zone " + zone.id);
  return cells[static_cast<std::size_t>(index)].area();
}

/// Head-turn and hand-travel terms of the intra-zone cost. They are fixed at
/// the zone's initial split: head turn is min-max normalized over the zone's
/// cells, hand travel uses the pointing-distance proxy F / diagonal.
struct LocalSignals {
  std::vector<double> head_turn;               // per cell
  std::vector<std::vector<double>> hand_travel;  // per cell pair
};

inline LocalSignals local_signals(const ZoneSpec& zone, const UserPose& pose) {
  LocalSignals s;
  const std::size_t n = zone.cells.size();
  std::vector<double> raw;
  for (std::size_t j = 0; j < n; ++j)
    raw.push_back(head_turn_angle(pose, zone.cell_center(static_cast<int>(j))));
  const auto [lo, hi] = raw.empty() ? std::pair{0.0, 0.0}
                                    : std::pair{*std::min_element(raw.begin(), raw.end()),
                                                *std::max_element(raw.begin(), raw.end())};
  for (double h : raw) s.head_turn.push_back(hi > lo ? detail::snap((h - lo) / (hi - lo)) : 0.0);
  const double diag = std::hypot(zone.width, zone.height);
  s.hand_travel.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      s.hand_travel[a][b] =
          (zone.cells[a].local_center() - zone.cells[b].local_center()).norm() / diag;
  return s;
}

/// Local cost plus lambda_s times the relevance-weighted (negative) area
/// share. Pointing distance is the only term that moves with theta.
inline double zone_objective(const ZoneSpec& zone, const std::vector<ZoneOccupant>& apps,
                             const RelevanceSet& relevance, const TransitionMatrix& P,
                             const CostWeights& weights, const LocalSignals& signals,
                             const ThetaParams& theta) {
  const std::vector<Cell> cells = instantiate(zone.kind, zone.width, zone.height, theta);
  const double diag = std::hypot(zone.width, zone.height);
  const double area = zone.width * zone.height;

  double local = 0.0;
  for (const ZoneOccupant& i : apps) {
    for (const ZoneOccupant& j : apps) {
      if (i.app == j.app) continue;
      const auto ci = static_cast<std::size_t>(i.cell);
      const auto cj = static_cast<std::size_t>(j.cell);
      const double f = (cells[ci].local_center() - cells[cj].local_center()).norm() / diag;
      const double c = weights.lambda_f * f + weights.lambda_h * signals.head_turn[cj] +
                       weights.lambda_m * signals.hand_travel[ci][cj];
      local += relevance_or_pinned(relevance, i.app) * relevance_or_pinned(relevance, j.app) *
               P.at(i.app, j.app) * c;
    }
  }
  double size = 0.0;
  for (const ZoneOccupant& i : apps)
    size -= relevance_or_pinned(relevance, i.app) * cells[static_cast<std::size_t>(i.cell)].area() / area;
  return local + weights.lambda_s * size;
}

/// Grid coordinates along one axis of the admissible box; a template without
/// a divider on the axis keeps the midpoint.
inline std::vector<double> grid_axis(bool has_divider, double extent, const SizingConfig& config) {
  if (!has_divider) return {0.5 * extent};
  const Interval box = admissible_split(extent, config.omega_margin);
  const int n = config.grid_resolution;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) out.push_back(box.lo + (box.hi - box.lo) * a / (n - 1));
  return out;
}

/// Grid search for the split point. Ties go to the smallest w0, then the
/// smallest h0. Locked zones keep their split.
inline SizingResult optimize_zone(const ZoneSpec& zone, const std::vector<ZoneOccupant>& apps,
                                  const RelevanceSet& relevance, const TransitionMatrix& P,
                                  const CostWeights& weights, const LocalSignals& signals,
                                  const SizingConfig& config) {
  config.validate();
  SizingResult out;
  out.zone_id = zone.id;
  if (zone.locked || zone.is_occlusion()) {
    out.theta_star = zone.theta;
    out.objective_value =
        zone.is_occlusion() ? 0.0 : zone_objective(zone, apps, relevance, P, weights, signals, zone.theta);
    out.evaluated_points = 1;
    return out;
  }
  const std::vector<double> ws = grid_axis(has_vertical_divider(zone.kind), zone.width, config);
  const std::vector<double> hs = grid_axis(has_horizontal_divider(zone.kind), zone.height, config);
  double best = std::numeric_limits<double>::infinity();
  for (double w0 : ws) {
    for (double h0 : hs) {
      const double v = zone_objective(zone, apps, relevance, P, weights, signals, {w0, h0});
      ++out.evaluated_points;
      if (v < best) {
        best = v;
        out.theta_star = {w0, h0};
      }
    }
  }
  out.objective_value = best;
  return out;
}

/// Smallest s >= 0 with atan(s * extent / |q + s * u|) >= angle, where q is
/// the zone center relative to the user and u the cell-center offset from
/// the zone center. Infinity when no scale reaches the angle.
inline double required_scale(double extent, const Vec3& q, const Vec3& u, double angle) {
  if (angle >= 0.5 * kPi) return std::numeric_limits<double>::infinity();
  const double t2 = std::tan(angle) * std::tan(angle);
  const double a = extent * extent - t2 * u.squaredNorm();
  const double b = -2.0 * t2 * q.dot(u);
  const double c = -t2 * q.squaredNorm();
  if (a <= 0.0) return std::numeric_limits<double>::infinity();
  return (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
}

/// Zone with the split `theta` and every dimension multiplied by `scale`,
/// keeping its center.
inline ZoneSpec scaled_zone(const ZoneSpec& zone, const ThetaParams& theta, double scale) {
  ZoneSpec out = zone;
  out.width = zone.width * scale;
  out.height = zone.height * scale;
  out.theta = {theta.w0 * scale, theta.h0 * scale};
  rebuild_cells(out);
  return out;
}

/// Grows the whole zone just enough for every occupied cell to meet the
/// readability angle, capped at readability.max_scale.
inline SizingResult readability_scaleup(const ZoneSpec& zone, SizingResult sizing,
                                        const std::vector<ZoneOccupant>& apps,
                                        const UserPose& pose, const ReadabilityConfig& readability) {
  const ZoneSpec laid_out = scaled_zone(zone, sizing.theta_star, 1.0);
  const Vec3 q = laid_out.position - pose.position;
  double need = 1.0;
  for (const ZoneOccupant& occ : apps) {
    const Cell& c = laid_out.cell(occ.cell);
    const Vec3 u = laid_out.cell_center(occ.cell) - laid_out.position;
    const double angle = readability.required_angle(occ.app);
    need = std::max({need, required_scale(c.width, q, u, angle), required_scale(c.height, q, u, angle)});
  }
  sizing.scale_factor = 1.0;
  if (need > 1.0) {
    // Slack so the scaled cells clear the threshold despite rounding.
    sizing.scale_factor = need * (1.0 + 1e-9);
    if (!(sizing.scale_factor <= readability.max_scale)) {
      sizing.scale_factor = readability.max_scale;
      sizing.scale_clamped = true;
      sizing.violations.push_back("readability: zone " + zone.id + " needs scale " +
                                  (std::isfinite(need) ? format_number(need) : "inf") +
                                  " beyond max " + format_number(readability.max_scale));
    }
  }
  return sizing;
}

/// Zone after applying a sizing result: split point, then uniform scale.
inline ZoneSpec apply_sizing(const ZoneSpec& zone, const SizingResult& sizing) {
  return scaled_zone(zone, sizing.theta_star, sizing.scale_factor);
}

}  // namespace xrzone

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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xrzone/errors.hpp"
#include "xrzone/geometry.hpp"

namespace xrzone {

enum class TemplateKind {
  kOneByOne,
  kTwoByTwo,
  kOneByTwoV,
  kOneByTwoH,
  kTwoByOneV,
  kTwoByOneH,
  kOcclusionFree,
};

inline constexpr std::array<TemplateKind, 6> kCellTemplates = {
    TemplateKind::kOneByOne,  TemplateKind::kTwoByTwo,  TemplateKind::kOneByTwoV,
    TemplateKind::kOneByTwoH, TemplateKind::kTwoByOneV, TemplateKind::kTwoByOneH};

inline std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kOneByOne: return "1x1";
    case TemplateKind::kTwoByTwo: return "2x2";
    case TemplateKind::kOneByTwoV: return "1x2v";
    case TemplateKind::kOneByTwoH: return "1x2h";
    case TemplateKind::kTwoByOneV: return "2x1v";
    case TemplateKind::kTwoByOneH: return "2x1h";
    case TemplateKind::kOcclusionFree: return "occlusion";
  }
  return "?";
}

inline TemplateKind template_from_string(std::string_view s) {
  for (TemplateKind k : kCellTemplates)
    if (to_string(k) == s) return k;
  if (s == to_string(TemplateKind::kOcclusionFree)) return TemplateKind::kOcclusionFree;
  throw Error(ErrorCode::kInvalidDocument, "unknown template '" + std::string(s) + "'");
}

inline int cell_count(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kOneByOne: return 1;
    case TemplateKind::kTwoByTwo: return 4;
    case TemplateKind::kOneByTwoV:
    case TemplateKind::kOneByTwoH: return 2;
    case TemplateKind::kTwoByOneV:
    case TemplateKind::kTwoByOneH: return 3;
    case TemplateKind::kOcclusionFree: return 0;
  }
  return 0;
}

/// Knob axes name the divider line: the vertical divider sits at w0, the
/// horizontal divider at h0.
enum class KnobAxis { kHorizontal, kVertical };

inline bool has_vertical_divider(TemplateKind kind) {
  return kind == TemplateKind::kOneByTwoV || kind == TemplateKind::kTwoByOneV ||
         kind == TemplateKind::kTwoByOneH || kind == TemplateKind::kTwoByTwo;
}

inline bool has_horizontal_divider(TemplateKind kind) {
  return kind == TemplateKind::kOneByTwoH || kind == TemplateKind::kTwoByOneV ||
         kind == TemplateKind::kTwoByOneH || kind == TemplateKind::kTwoByTwo;
}

inline bool has_divider(TemplateKind kind, KnobAxis axis) {
  return axis == KnobAxis::kVertical ? has_vertical_divider(kind)
                                     : has_horizontal_divider(kind);
}

/// Split point (w0, h0), measured from the zone's top-left corner.
struct ThetaParams {
  double w0 = 0.0;
  double h0 = 0.0;

  friend bool operator==(const ThetaParams&, const ThetaParams&) = default;
};

struct Cell {
  int index = 0;
  Vec2 origin = Vec2::Zero();  // zone-local, top-left, y grows downward
  double width = 0.0;
  double height = 0.0;
  std::optional<std::string> occupant;

  double area() const { return width * height; }
  Vec2 local_center() const { return origin + Vec2(0.5 * width, 0.5 * height); }
};

struct ZoneSpec {
  std::string id;
  TemplateKind kind = TemplateKind::kOneByOne;
  double width = 1.0;
  double height = 1.0;
  Vec3 position = Vec3(0.0, 0.0, 2.0);
  Quat orientation = Quat::Identity();
  ThetaParams theta{0.5, 0.5};
  std::vector<Cell> cells;
  bool locked = false;

  bool is_occlusion() const { return kind == TemplateKind::kOcclusionFree; }

  PlanarRect rect() const { return {position, orientation, width, height}; }

  const Cell& cell(int index) const {
    if (index < 0 || index >= static_cast<int>(cells.size()))
      throw Error(ErrorCode::kNotFound,
                  "zone '" + id + "' has no cell " + std::to_string(index));
    return cells[static_cast<std::size_t>(index)];
  }
  Cell& cell(int index) {
    return const_cast<Cell&>(static_cast<const ZoneSpec&>(*this).cell(index));
  }

  Vec3 local_to_world(const Vec2& local) const {
    const FacingFrame f = frame_from_orientation(orientation);
    return position + f.right * (local.x() - 0.5 * width) +
           f.up * (0.5 * height - local.y());
  }

  Vec3 cell_center(int index) const { return local_to_world(cell(index).local_center()); }

  int occupied_count() const {
    return static_cast<int>(std::count_if(cells.begin(), cells.end(),
                                          [](const Cell& c) { return c.occupant.has_value(); }));
  }
};

/// Default split for a template: the midpoint, which also pins the unused
/// axis of single-divider templates.
inline ThetaParams default_theta(double width, double height) {
  return {0.5 * width, 0.5 * height};
}

/// Cell rectangles for a template under split point `theta`. Index order is
/// row-major from the top-left cell, except 2x2 which follows P0..P3
/// (top-left, top-right, bottom-right, bottom-left).
inline std::vector<Cell> instantiate(TemplateKind kind, double W, double H,
                                     const ThetaParams& theta) {
  if (!(W > 0.0) || !(H > 0.0))
    throw Error(ErrorCode::kDomain, "zone dimensions must be positive");
  if (kind == TemplateKind::kOcclusionFree) return {};
  const double w0 = theta.w0;
  const double h0 = theta.h0;
  if (has_vertical_divider(kind) && !(w0 > 0.0 && w0 < W))
    throw Error(ErrorCode::kDegenerateCell, "w0 must lie strictly inside (0, W)");
  if (has_horizontal_divider(kind) && !(h0 > 0.0 && h0 < H))
    throw Error(ErrorCode::kDegenerateCell, "h0 must lie strictly inside (0, H)");

  std::vector<Cell> cells;
  auto add = [&](double x, double y, double w, double h) {
    Cell c;
    c.index = static_cast<int>(cells.size());
    c.origin = Vec2(x, y);
    c.width = w;
    c.height = h;
    cells.push_back(std::move(c));
  };
  switch (kind) {
    case TemplateKind::kOneByOne:
      add(0, 0, W, H);
      break;
    case TemplateKind::kOneByTwoV:
      add(0, 0, w0, H);
      add(w0, 0, W - w0, H);
      break;
    case TemplateKind::kOneByTwoH:
      add(0, 0, W, h0);
      add(0, h0, W, H - h0);
      break;
    case TemplateKind::kTwoByOneV:
      add(0, 0, w0, H);
      add(w0, 0, W - w0, h0);
      add(w0, h0, W - w0, H - h0);
      break;
    case TemplateKind::kTwoByOneH:
      add(0, 0, W, h0);
      add(0, h0, w0, H - h0);
      add(w0, h0, W - w0, H - h0);
      break;
    case TemplateKind::kTwoByTwo:
      add(0, 0, w0, h0);
      add(w0, 0, W - w0, h0);
      add(w0, h0, W - w0, H - h0);
      add(0, h0, w0, H - h0);
      break;
    case TemplateKind::kOcclusionFree:
      break;
  }
  return cells;
}

/// Rebuilds cell geometry from the zone's kind/size/theta, keeping
/// occupants by cell index.
inline void rebuild_cells(ZoneSpec& zone) {
  std::vector<Cell> fresh = instantiate(zone.kind, zone.width, zone.height, zone.theta);
  for (std::size_t i = 0; i < fresh.size() && i < zone.cells.size(); ++i)
    fresh[i].occupant = zone.cells[i].occupant;
  zone.cells = std::move(fresh);
}

inline ZoneSpec make_zone(std::string id, TemplateKind kind, double W, double H,
                          const Vec3& position, const UserPose& pose,
                          std::optional<ThetaParams> theta = std::nullopt) {
  ZoneSpec zone;
  zone.id = std::move(id);
  zone.kind = kind;
  zone.width = W;
  zone.height = H;
  zone.position = position;
  zone.orientation = face_user_orientation(position, pose);
  zone.theta = default_theta(W, H);
  if (theta) {
    if (has_vertical_divider(kind)) zone.theta.w0 = theta->w0;
    if (has_horizontal_divider(kind)) zone.theta.h0 = theta->h0;
  }
  zone.cells = instantiate(kind, W, H, zone.theta);
  return zone;
}

/// Admissible interval of a split coordinate along an axis of length `extent`.
inline Interval admissible_split(double extent, double margin) {
  return {margin * extent, (1.0 - margin) * extent};
}

struct KnobResult {
  ZoneSpec zone;
  bool clamped = false;
};

inline KnobResult move_inner_knob(const ZoneSpec& zone, KnobAxis axis, double new_value,
                                  double margin) {
  if (!has_divider(zone.kind, axis))
    throw Error(ErrorCode::kDomain, "zone '" + zone.id + "' has no divider on that axis");
  if (!std::isfinite(new_value)) throw Error(ErrorCode::kDomain, "knob value must be finite");
  KnobResult out{zone, false};
  const double extent = axis == KnobAxis::kVertical ? zone.width : zone.height;
  const Interval bounds = admissible_split(extent, margin);
  double v = std::clamp(new_value, bounds.lo, bounds.hi);
  out.clamped = v != new_value;
  (axis == KnobAxis::kVertical ? out.zone.theta.w0 : out.zone.theta.h0) = v;
  rebuild_cells(out.zone);
  return out;
}

/// Resizes the zone about its center; the split point and hosted windows
/// scale proportionally.
inline ZoneSpec move_outer_knob(const ZoneSpec& zone, double new_W, double new_H) {
  if (!(new_W > 0.0) || !(new_H > 0.0) || !std::isfinite(new_W) || !std::isfinite(new_H))
    throw Error(ErrorCode::kDomain, "zone dimensions must be positive");
  ZoneSpec out = zone;
  out.theta.w0 = zone.theta.w0 * (new_W / zone.width);
  out.theta.h0 = zone.theta.h0 * (new_H / zone.height);
  out.width = new_W;
  out.height = new_H;
  rebuild_cells(out);
  return out;
}

/// Moves the zone to a new center and re-faces it toward the user.
inline ZoneSpec translate_zone(const ZoneSpec& zone, const Vec3& position,
                               const UserPose& pose) {
  ZoneSpec out = zone;
  out.position = position;
  out.orientation = face_user_orientation(position, pose);
  return out;
}

inline AngularFootprint angular_footprint(const ZoneSpec& zone, const UserPose& pose) {
  return angular_footprint(zone.rect(), pose);
}

struct OcclusionConflict {
  std::string zone_id;
  std::string occlusion_id;

  friend bool operator==(const OcclusionConflict&, const OcclusionConflict&) = default;
};

inline std::vector<OcclusionConflict> occlusion_conflicts(
    const std::vector<ZoneSpec>& zones, const std::vector<ZoneSpec>& occlusions,
    const UserPose& pose) {
  std::vector<OcclusionConflict> out;
  std::vector<AngularFootprint> occ_fp;
  occ_fp.reserve(occlusions.size());
  for (const ZoneSpec& o : occlusions) {
    if (!o.is_occlusion())
      throw Error(ErrorCode::kDomain, "'" + o.id + "' is not an occlusion-free zone");
    occ_fp.push_back(angular_footprint(o, pose));
  }
  for (const ZoneSpec& z : zones) {
    const AngularFootprint fp = angular_footprint(z, pose);
    for (std::size_t j = 0; j < occlusions.size(); ++j)
      if (footprints_overlap(fp, occ_fp[j])) out.push_back({z.id, occlusions[j].id});
  }
  return out;
}

namespace detail {

inline bool shift_is_free(double delta, const std::vector<Interval>& forbidden) {
  for (const Interval& f : forbidden) {
    // Bring delta into the window of the forbidden interval's center.
    const double c = f.center();
    const double d = c + wrap_angle(delta - c);
    if (d > f.lo + kOverlapTolerance && d < f.hi - kOverlapTolerance) return false;
  }
  return true;
}

}  // namespace detail

/// Smallest azimuth shift that clears `fp` from every blocker footprint.
/// Positive shifts move right; equal left/right shifts resolve rightward.
/// Returns nullopt when no shift within +-pi is free.
inline std::optional<double> clearing_shift(const AngularFootprint& fp,
                                            const std::vector<AngularFootprint>& blockers) {
  constexpr double kMargin = 1e-7;
  std::vector<Interval> forbidden;
  for (const AngularFootprint& b : blockers) {
    if (!intervals_overlap(fp.elevation, b.elevation)) continue;
    // Re-center the blocker near the zone before forming the shift interval.
    const double s = wrap_angle(b.azimuth.center() - fp.azimuth.center()) -
                     (b.azimuth.center() - fp.azimuth.center());
    forbidden.push_back({b.azimuth.lo + s - fp.azimuth.hi, b.azimuth.hi + s - fp.azimuth.lo});
  }
  if (detail::shift_is_free(0.0, forbidden)) return 0.0;

  std::optional<double> best;
  auto consider = [&](double delta) {
    delta = wrap_angle(delta);
    if (std::abs(delta) > kPi || !detail::shift_is_free(delta, forbidden)) return;
    if (!best || std::abs(delta) < std::abs(*best) - 1e-12 ||
        (std::abs(std::abs(delta) - std::abs(*best)) <= 1e-12 && delta > *best))
      best = delta;
  };
  for (const Interval& f : forbidden) {
    consider(f.hi + kMargin);
    consider(f.lo - kMargin);
  }
  return best;
}

inline ZoneSpec rotate_zone_about_user(const ZoneSpec& zone, const UserPose& pose,
                                       double delta) {
  return translate_zone(zone, rotate_about_user(zone.position, pose, delta), pose);
}

/// Slides the zone sideways (constant distance from the user) to the nearest
/// bearing where it no longer overlaps any occlusion-free zone.
inline ZoneSpec resolve_intrusion(const ZoneSpec& zone, const std::vector<ZoneSpec>& occlusions,
                                  const UserPose& pose) {
  std::vector<AngularFootprint> blockers;
  for (const ZoneSpec& o : occlusions)
    if (o.id != zone.id) blockers.push_back(angular_footprint(o, pose));

  ZoneSpec current = zone;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const AngularFootprint fp = angular_footprint(current, pose);
    bool conflict = false;
    for (const AngularFootprint& b : blockers) conflict = conflict || footprints_overlap(fp, b);
    if (!conflict) return current;
    const std::optional<double> shift = clearing_shift(fp, blockers);
    if (!shift) break;
    current = rotate_zone_about_user(current, pose, *shift);
  }
  throw Error(ErrorCode::kUnresolvable,
              "no occlusion-free bearing available for '" + zone.id + "'");
}

inline ZoneSpec make_occlusion(std::string id, double W, double H, const Vec3& position,
                               const UserPose& pose) {
  return make_zone(std::move(id), TemplateKind::kOcclusionFree, W, H, position, pose);
}

}  // namespace xrzone

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

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "xrzone/errors.hpp"

/// User-relative 3D math. World frame is y-up with a left-handed basis
/// (right = up x forward), so a user looking along +z has +x on the right.
/// Angles are radians everywhere in this header.
namespace xrzone {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = std::numbers::pi;

inline Vec3 world_up() { return Vec3(0.0, 1.0, 0.0); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct UserPose {
  Vec3 position = Vec3::Zero();
  Vec3 forward = Vec3(0.0, 0.0, 1.0);

  void validate() const {
    if (!position.allFinite())
      throw Error(ErrorCode::kDomain, "pose position must be finite");
    if (!forward.allFinite() || std::abs(forward.norm() - 1.0) > 1e-9)
      throw Error(ErrorCode::kDomain, "pose forward must be a unit vector");
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double center() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

struct AngularFootprint {
  Interval azimuth;
  Interval elevation;
  bool behind_user = false;
};

struct AngularSize {
  double azimuthal = 0.0;
  double elevational = 0.0;

  double min() const { return std::min(azimuthal, elevational); }
};

/// Visual angle subtended by a w x h rectangle seen at distance d, taken as
/// (arctan(w/d), arctan(h/d)).
inline AngularSize angular_size(double width, double height, double distance) {
  if (!(width > 0.0) || !(height > 0.0) || !(distance > 0.0))
    throw Error(ErrorCode::kDomain, "angular_size requires positive inputs");
  return {std::atan(width / distance), std::atan(height / distance)};
}

/// Angle between the user's forward vector and the direction to `target`.
inline double head_turn_angle(const UserPose& pose, const Vec3& target) {
  const Vec3 to_target = target - pose.position;
  const double len = to_target.norm();
  if (!(len > 0.0))
    throw Error(ErrorCode::kDomain, "head_turn_angle: target coincides with user");
  const double cosine = pose.forward.dot(to_target) / (pose.forward.norm() * len);
  return std::acos(std::clamp(cosine, -1.0, 1.0));
}

/// Horizontal user frame: forward projected onto the ground plane, plus the
/// matching right vector. Looking straight up/down falls back to +z.
struct YawFrame {
  Vec3 forward;
  Vec3 right;
};

inline YawFrame yaw_frame(const UserPose& pose) {
  Vec3 fwd = pose.forward - pose.forward.dot(world_up()) * world_up();
  if (fwd.norm() < 1e-9) fwd = Vec3(0.0, 0.0, 1.0);
  fwd.normalize();
  return {fwd, world_up().cross(fwd).normalized()};
}

struct Bearing {
  double azimuth = 0.0;    // positive to the user's right
  double elevation = 0.0;  // positive up
};

inline Bearing bearing_of(const UserPose& pose, const Vec3& point) {
  const YawFrame frame = yaw_frame(pose);
  const Vec3 d = point - pose.position;
  const double horizontal = std::hypot(d.dot(frame.right), d.dot(frame.forward));
  return {std::atan2(d.dot(frame.right), d.dot(frame.forward)),
          std::atan2(d.dot(world_up()), horizontal)};
}

/// Basis of a planar panel that faces the user. `view` points from the user
/// toward the panel (the panel's local +z), `normal` is its negation.
struct FacingFrame {
  Vec3 right;
  Vec3 up;
  Vec3 view;
  bool degenerate = false;

  Vec3 normal() const { return -view; }
  Quat orientation() const {
    Eigen::Matrix3d m;
    m.col(0) = right;
    m.col(1) = up;
    m.col(2) = view;
    return Quat(m);
  }
};

inline FacingFrame frame_from_orientation(const Quat& q) {
  const Eigen::Matrix3d m = q.normalized().toRotationMatrix();
  return {m.col(0), m.col(1), m.col(2), false};
}

inline FacingFrame face_user_frame(const Vec3& zone_center, const UserPose& pose) {
  Vec3 view = zone_center - pose.position;
  if (!(view.norm() > 0.0))
    throw Error(ErrorCode::kDomain, "face_user: zone center coincides with user");
  view.normalize();

  FacingFrame frame;
  Vec3 up = world_up() - world_up().dot(view) * view;
  if (up.norm() < 1e-9) {
    // Zone straight above or below: the user's forward becomes the up reference.
    frame.degenerate = true;
    up = pose.forward - pose.forward.dot(view) * view;
    if (up.norm() < 1e-9) up = Vec3(0.0, 0.0, 1.0) - view.z() * view;
  }
  frame.up = up.normalized();
  frame.view = view;
  frame.right = frame.up.cross(view).normalized();
  return frame;
}

inline Quat face_user_orientation(const Vec3& zone_center, const UserPose& pose) {
  return face_user_frame(zone_center, pose).orientation();
}

/// An oriented rectangle in world space (a zone or a free-floating window).
struct PlanarRect {
  Vec3 center = Vec3::Zero();
  Quat orientation = Quat::Identity();
  double width = 0.0;
  double height = 0.0;

  std::array<Vec3, 4> corners() const {
    const FacingFrame f = frame_from_orientation(orientation);
    const Vec3 dx = f.right * (0.5 * width);
    const Vec3 dy = f.up * (0.5 * height);
    return {center - dx + dy, center + dx + dy, center + dx - dy, center - dx - dy};
  }
};

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a;
}

/// Angular extent of a rectangle as seen by the user. Besides the corners,
/// every edge contributes its point nearest the user and a few interior
/// samples: on a wide rectangle close to the user the top edge peaks in
/// elevation mid-edge, and a corner-only bound would not contain the
/// footprints of the rectangle's own cells.
inline AngularFootprint angular_footprint(const PlanarRect& rect, const UserPose& pose) {
  constexpr int kEdgeSamples = 8;
  AngularFootprint fp;
  const Bearing c = bearing_of(pose, rect.center);
  fp.behind_user = std::abs(c.azimuth) > 0.5 * kPi;

  // Azimuths are unwrapped relative to the center bearing so a zone
  // straddling +-180 degrees still yields a contiguous interval.
  bool first = true;
  auto include = [&](const Vec3& p) {
    if (!((p - pose.position).norm() > 0.0)) return;
    const Bearing b = bearing_of(pose, p);
    const double az = c.azimuth + wrap_angle(b.azimuth - c.azimuth);
    if (first) {
      fp.azimuth = {az, az};
      fp.elevation = {b.elevation, b.elevation};
      first = false;
    } else {
      fp.azimuth.lo = std::min(fp.azimuth.lo, az);
      fp.azimuth.hi = std::max(fp.azimuth.hi, az);
      fp.elevation.lo = std::min(fp.elevation.lo, b.elevation);
      fp.elevation.hi = std::max(fp.elevation.hi, b.elevation);
    }
  };
  const std::array<Vec3, 4> corners = rect.corners();
  for (const Vec3& corner : corners) include(corner);
  for (std::size_t e = 0; e < 4; ++e) {
    const Vec3& a = corners[e];
    const Vec3 d = corners[(e + 1) % 4] - a;
    const double len2 = d.squaredNorm();
    if (len2 > 0.0) include(a + std::clamp((pose.position - a).dot(d) / len2, 0.0, 1.0) * d);
    for (int k = 1; k < kEdgeSamples; ++k) include(a + (static_cast<double>(k) / kEdgeSamples) * d);
  }
  return fp;
}

inline constexpr double kOverlapTolerance = 1e-9;

/// Open-interval overlap; intervals that merely touch do not overlap.
inline bool intervals_overlap(const Interval& a, const Interval& b,
                              double tol = kOverlapTolerance) {
  return a.lo < b.hi - tol && b.lo < a.hi - tol;
}

/// Azimuth overlap is evaluated on the circle: `b` is shifted by a multiple
/// of 2pi so its center lies within pi of `a`'s center.
inline bool footprints_overlap(const AngularFootprint& a, const AngularFootprint& b,
                               double tol = kOverlapTolerance) {
  if (!intervals_overlap(a.elevation, b.elevation, tol)) return false;
  const double shift = wrap_angle(b.azimuth.center() - a.azimuth.center()) -
                       (b.azimuth.center() - a.azimuth.center());
  const Interval moved{b.azimuth.lo + shift, b.azimuth.hi + shift};
  return intervals_overlap(a.azimuth, moved, tol);
}

/// Rotates `point` about the vertical axis through the user by `delta`
/// radians; positive delta increases the point's azimuth.
inline Vec3 rotate_about_user(const Vec3& point, const UserPose& pose, double delta) {
  const Eigen::AngleAxisd rot(delta, world_up());
  return pose.position + rot * (point - pose.position);
}

}  // namespace xrzone

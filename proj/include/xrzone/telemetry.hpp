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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xrzone/errors.hpp"
#include "xrzone/geometry.hpp"

namespace xrzone {

enum class EventKind { kPointerDown, kPointerUp, kDragStart, kDragEnd, kFocus, kHover, kTap };

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPointerDown: return "pointer_down";
    case EventKind::kPointerUp: return "pointer_up";
    case EventKind::kDragStart: return "drag_start";
    case EventKind::kDragEnd: return "drag_end";
    case EventKind::kFocus: return "focus";
    case EventKind::kHover: return "hover";
    case EventKind::kTap: return "tap";
  }
  return "?";
}

inline EventKind event_kind_from_string(std::string_view s) {
  for (EventKind k : {EventKind::kPointerDown, EventKind::kPointerUp, EventKind::kDragStart,
                      EventKind::kDragEnd, EventKind::kFocus, EventKind::kHover, EventKind::kTap})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::kInvalidDocument, "unknown event kind '" + std::string(s) + "'");
}

struct InteractionEvent {
  double timestamp = 0.0;  // seconds
  EventKind kind = EventKind::kFocus;
  std::optional<std::string> app;
  std::optional<Vec3> hand_position;
};

/// Row i holds the probability of switching focus from apps[i] to each other app.
struct TransitionMatrix {
  std::vector<std::string> apps;
  Eigen::MatrixXd P;

  std::optional<std::size_t> index_of(std::string_view app) const {
    for (std::size_t i = 0; i < apps.size(); ++i)
      if (apps[i] == app) return i;
    return std::nullopt;
  }

  /// Probability for a pair of ids; unknown ids have probability 0.
  double at(std::string_view from, std::string_view to) const {
    const auto i = index_of(from);
    const auto j = index_of(to);
    if (!i || !j) return 0.0;
    return P(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j));
  }
};

struct SignalStats {
  double mean_hand_travel = 0.0;  // meters
  std::size_t samples = 0;
};

/// Rejects logs whose timestamps go backwards.
inline void check_time_ordered(const std::vector<InteractionEvent>& log,
                               std::optional<double> after = std::nullopt) {
  double last = after.value_or(-std::numeric_limits<double>::infinity());
  for (const InteractionEvent& e : log) {
    if (!std::isfinite(e.timestamp) || e.timestamp < last)
      throw Error(ErrorCode::kInvalidDocument, "event timestamps must be non-decreasing");
    last = e.timestamp;
  }
}

/// One distance per pointer_down/pointer_up pair that carries both hand
/// positions. A down without a matching up is discarded by the next down.
inline std::vector<double> hand_travel(const std::vector<InteractionEvent>& log) {
  std::vector<double> out;
  std::optional<Vec3> down;
  for (const InteractionEvent& e : log) {
    if (e.kind == EventKind::kPointerDown) {
      down = e.hand_position;
    } else if (e.kind == EventKind::kPointerUp) {
      if (down && e.hand_position) out.push_back((*e.hand_position - *down).norm());
      down.reset();
    }
  }
  return out;
}

inline SignalStats hand_travel_stats(const std::vector<InteractionEvent>& log) {
  const std::vector<double> d = hand_travel(log);
  SignalStats s;
  s.samples = d.size();
  if (!d.empty()) {
    double sum = 0.0;
    for (double x : d) sum += x;
    s.mean_hand_travel = sum / static_cast<double>(d.size());
  }
  return s;
}

/// Laplace-smoothed focus-switch frequencies. Consecutive focus events on
/// distinct apps count as one transition; self-transitions are excluded.
inline TransitionMatrix estimate_transitions(const std::vector<InteractionEvent>& log,
                                             const std::vector<std::string>& apps,
                                             double smoothing = 1.0) {
  if (apps.empty()) throw Error(ErrorCode::kDomain, "estimate_transitions: no apps");
  if (!(smoothing >= 0.0)) throw Error(ErrorCode::kDomain, "smoothing must be >= 0");
  TransitionMatrix tm;
  tm.apps = apps;
  const auto n = static_cast<Eigen::Index>(apps.size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);

  std::optional<std::size_t> prev;
  for (const InteractionEvent& e : log) {
    if (e.kind != EventKind::kFocus || !e.app) continue;
    const auto cur = tm.index_of(*e.app);
    if (!cur) continue;
    if (prev && *prev != *cur)
      counts(static_cast<Eigen::Index>(*prev), static_cast<Eigen::Index>(*cur)) += 1.0;
    prev = cur;
  }

  tm.P = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) total += counts(i, j) + smoothing;
    if (total <= 0.0) continue;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) tm.P(i, j) = (counts(i, j) + smoothing) / total;
  }
  return tm;
}

}  // namespace xrzone

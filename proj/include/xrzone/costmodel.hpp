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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xrzone/errors.hpp"
#include "xrzone/geometry.hpp"
#include "xrzone/layout.hpp"
#include "xrzone/telemetry.hpp"
#include "xrzone/types.hpp"

namespace xrzone {

struct CostWeights {
  double lambda_f = 1.0 / 3.0;
  double lambda_h = 1.0 / 3.0;
  double lambda_m = 1.0 / 3.0;
  double lambda_s = 0.5;

  void validate() const {
    if (!(lambda_f >= 0 && lambda_h >= 0 && lambda_m >= 0 && lambda_s >= 0))
      throw Error(ErrorCode::kDomain, "cost weights must be non-negative");
    if (std::abs(lambda_f + lambda_h + lambda_m - 1.0) > 1e-9)
      throw Error(ErrorCode::kDomain, "lambda_f + lambda_h + lambda_m must equal 1");
  }
};

struct SignalBundle {
  double F_raw = 0.0;  // meters
  double H_raw = 0.0;  // radians
  double M_raw = 0.0;  // meters
  double F_norm = 0.0;
  double H_norm = 0.0;
  double M_norm = 0.0;
  bool same_zone = false;
};

inline const ZoneSpec& find_zone(const std::vector<ZoneSpec>& zones, std::string_view id) {
  for (const ZoneSpec& z : zones)
    if (z.id == id) return z;
  throw Error(ErrorCode::kNotFound, "no zone '" + std::string(id) + "'");
}

/// Pointing distance: cell centers within one zone, zone centers across zones.
inline double pointing_distance(const CellRef& a, const CellRef& b,
                                const std::vector<ZoneSpec>& zones) {
  const ZoneSpec& za = find_zone(zones, a.zone);
  const ZoneSpec& zb = find_zone(zones, b.zone);
  if (a.zone == b.zone) {
    return (za.cell(a.cell).local_center() - za.cell(b.cell).local_center()).norm();
  }
  za.cell(a.cell);
  zb.cell(b.cell);
  return (za.position - zb.position).norm();
}

namespace detail {

// Normalized signals are snapped to a 2^-40 grid so that a uniform rescale of
// the raw signals (which only perturbs the last ulp) yields identical values.
inline double snap(double x) { return std::ldexp(std::round(std::ldexp(x, 40)), -40); }

template <typename Raw, typename Norm>
void min_max(std::vector<SignalBundle>& v, Raw raw, Norm norm) {
  double lo = raw(v.front());
  double hi = lo;
  for (const SignalBundle& b : v) {
    lo = std::min(lo, raw(b));
    hi = std::max(hi, raw(b));
  }
  const double span = hi - lo;
  for (SignalBundle& b : v)
    norm(b) = span > 0.0 ? std::clamp(snap((raw(b) - lo) / span), 0.0, 1.0) : 0.0;
}

}  // namespace detail

/// Min-max normalizes each signal over the candidate set; a constant signal
/// maps to 0 everywhere.
inline std::vector<SignalBundle> normalize_signals(std::vector<SignalBundle> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kDomain, "normalize_signals: no candidates");
  detail::min_max(candidates, [](const SignalBundle& b) { return b.F_raw; },
                  [](SignalBundle& b) -> double& { return b.F_norm; });
  detail::min_max(candidates, [](const SignalBundle& b) { return b.H_raw; },
                  [](SignalBundle& b) -> double& { return b.H_norm; });
  detail::min_max(candidates, [](const SignalBundle& b) { return b.M_raw; },
                  [](SignalBundle& b) -> double& { return b.M_norm; });
  return candidates;
}

inline double instantaneous_cost(const SignalBundle& b, const CostWeights& w) {
  return w.lambda_f * b.F_norm + w.lambda_h * b.H_norm + w.lambda_m * b.M_norm;
}

struct CostModelOptions {
  CostWeights weights;
  SignalStats hand_stats;
  /// Multiplies every raw signal; exists for invariance checks.
  double signal_scale = 1.0;
};

/// Minimum telemetry gestures before measured hand travel replaces the
/// pointing-distance proxy for M.
inline constexpr std::size_t kMinHandSamples = 10;

/// Planning basis for one recommendation: every cell of every zone, with the
/// normalized transition cost c(a -> b) for an app in cell a switching to an
/// app in cell b. Signals are normalized once over all ordered cell pairs so
/// that costs are comparable across engines and placement orders.
class CostContext {
 public:
  CostContext() = default;

  CostContext(const std::vector<ZoneSpec>& zones, const UserPose& pose,
              const CostModelOptions& options = {})
      : zones_(zones), weights_(options.weights) {
    weights_.validate();
    for (const ZoneSpec& z : zones) {
      if (z.is_occlusion()) continue;
      for (const Cell& c : z.cells) {
        cells_.push_back({z.id, c.index});
        head_turn_.push_back(head_turn_angle(pose, z.cell_center(c.index)));
      }
    }
    const auto n = static_cast<Eigen::Index>(cells_.size());
    cost_ = Eigen::MatrixXd::Zero(n, n);
    if (n < 2) return;

    std::vector<SignalBundle> bundles;
    bundles.reserve(static_cast<std::size_t>(n * (n - 1)));
    double f_sum = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        if (a == b) continue;
        SignalBundle s;
        s.same_zone = cells_[idx(a)].zone == cells_[idx(b)].zone;
        s.F_raw = options.signal_scale * pointing_distance(cells_[idx(a)], cells_[idx(b)], zones);
        s.H_raw = options.signal_scale * head_turn_[idx(b)];
        f_sum += s.F_raw;
        bundles.push_back(s);
      }
    }
    const double f_mean = f_sum / static_cast<double>(bundles.size());
    const bool measured = options.hand_stats.samples >= kMinHandSamples && f_mean > 0.0;
    for (SignalBundle& s : bundles) {
      s.M_raw = measured ? options.signal_scale * options.hand_stats.mean_hand_travel *
                               s.F_raw / f_mean
                         : s.F_raw;
    }
    bundles = normalize_signals(std::move(bundles));

    std::size_t k = 0;
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        if (a != b) cost_(a, b) = instantaneous_cost(bundles[k++], weights_);
  }

  const std::vector<CellRef>& cells() const { return cells_; }
  const std::vector<ZoneSpec>& zones() const { return zones_; }
  const CostWeights& weights() const { return weights_; }

  std::optional<std::size_t> index_of(const CellRef& ref) const {
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i] == ref) return i;
    return std::nullopt;
  }

  std::size_t require(const CellRef& ref) const {
    const auto i = index_of(ref);
    if (!i)
      throw Error(ErrorCode::kNotFound,
                  "no cell " + ref.zone + "#" + std::to_string(ref.cell) + " in cost context");
    return *i;
  }

  /// Normalized instantaneous cost of switching from cell `from` to cell `to`.
  double transition(std::size_t from, std::size_t to) const {
    return cost_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
  }

  double head_turn(std::size_t cell) const { return head_turn_[cell]; }

 private:
  static std::size_t idx(Eigen::Index i) { return static_cast<std::size_t>(i); }

  std::vector<ZoneSpec> zones_;
  CostWeights weights_;
  std::vector<CellRef> cells_;
  std::vector<double> head_turn_;
  Eigen::MatrixXd cost_;
};

/// Relevance used in the joint-relevance products. Apps the user already
/// placed by hand are not always predicted; they count as certainly used.
inline double relevance_or_pinned(const RelevanceSet& relevance, std::string_view app) {
  return relevance.find(app).value_or(1.0);
}

/// Both transition directions between app i in cell `ci` and app l in `cl`:
/// r_i r_l P_il c(i->l) + r_l r_i P_li c(l->i).
inline double pair_cost(double r_i, double r_l, double p_il, double p_li, double c_il, double c_li) {
  return r_i * r_l * p_il * c_il + r_l * r_i * p_li * c_li;
}

inline double pair_cost(double r_i, double r_l, double p_il, double p_li,
                        const CostContext& ctx, std::size_t ci, std::size_t cl) {
  return pair_cost(r_i, r_l, p_il, p_li, ctx.transition(ci, cl), ctx.transition(cl, ci));
}

struct CostEntry {
  CellRef cell;
  double cost = 0.0;
};

/// C[i][k][j] for one app: one entry per empty cell, relative to the apps
/// already placed in `prev`.
struct CostMatrix {
  std::string app;
  std::vector<std::string> context;  // the previously assigned apps
  std::vector<CostEntry> entries;

  const CostEntry* find(const CellRef& cell) const {
    for (const CostEntry& e : entries)
      if (e.cell == cell) return &e;
    return nullptr;
  }

  /// Lowest-cost entry; ties go to the lowest (zone id, cell index).
  const CostEntry* argmin() const {
    const CostEntry* best = nullptr;
    for (const CostEntry& e : entries)
      if (!best || e.cost < best->cost || (e.cost == best->cost && e.cell < best->cell))
        best = &e;
    return best;
  }
};

inline CostMatrix cost_matrix(const std::string& app, const RelevanceSet& relevance,
                              const Assignment& prev, const TransitionMatrix& P,
                              const CostContext& ctx) {
  CostMatrix out;
  out.app = app;
  const double r_i = relevance_or_pinned(relevance, app);

  struct Placed {
    double r;
    double p_il;
    double p_li;
    std::size_t cell;
  };
  std::vector<Placed> placed;
  std::vector<bool> taken(ctx.cells().size(), false);
  for (const AssignmentEntry& e : prev.entries) {
    const std::size_t c = ctx.require(e.cell);
    taken[c] = true;
    if (e.app == app) continue;
    out.context.push_back(e.app);
    placed.push_back({relevance_or_pinned(relevance, e.app), P.at(app, e.app), P.at(e.app, app), c});
  }
  for (std::size_t c = 0; c < ctx.cells().size(); ++c) {
    if (taken[c]) continue;
    double sum = 0.0;
    for (const Placed& l : placed) sum += pair_cost(r_i, l.r, l.p_il, l.p_li, ctx, c, l.cell);
    out.entries.push_back({ctx.cells()[c], sum});
  }
  return out;
}

}  // namespace xrzone

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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "xrzone/errors.hpp"

/// Records shared by the planning modules: goals, the app catalog,
/// relevance predictions and app-to-cell assignments.
namespace xrzone {

enum class GoalSource { kTyped, kTranscribed };

inline std::string_view to_string(GoalSource s) {
  return s == GoalSource::kTyped ? "typed" : "transcribed";
}

struct Goal {
  std::string text;
  GoalSource source = GoalSource::kTyped;

  static Goal typed(std::string text) {
    Goal g{std::move(text), GoalSource::kTyped};
    g.validate();
    return g;
  }

  void validate() const {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
      throw Error(ErrorCode::kDomain, "goal text is empty");
  }
};

enum class Aspect { kLandscape, kPortrait, kAny };

inline std::string_view to_string(Aspect a) {
  switch (a) {
    case Aspect::kLandscape: return "landscape";
    case Aspect::kPortrait: return "portrait";
    case Aspect::kAny: return "any";
  }
  return "any";
}

struct AppDescriptor {
  std::string id;
  std::string name;
  std::string category;
  Aspect preferred_aspect = Aspect::kAny;
  int min_rows = 20;
  std::vector<std::string> keywords;
};

inline void validate_catalog(const std::vector<AppDescriptor>& catalog) {
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (catalog[i].id.empty()) throw Error(ErrorCode::kInvalidDocument, "catalog app without id");
    if (catalog[i].min_rows < 1)
      throw Error(ErrorCode::kInvalidDocument, "min_rows must be >= 1 for " + catalog[i].id);
    for (std::size_t j = 0; j < i; ++j)
      if (catalog[j].id == catalog[i].id)
        throw Error(ErrorCode::kDuplicate, "duplicate catalog id " + catalog[i].id);
  }
}

struct RelevanceEntry {
  std::string app;
  double r = 0.0;
};

struct RelevanceSet {
  std::vector<RelevanceEntry> entries;
  Goal goal;

  std::optional<double> find(std::string_view app) const {
    for (const RelevanceEntry& e : entries)
      if (e.app == app) return e.r;
    return std::nullopt;
  }
};

struct CellRef {
  std::string zone;
  int cell = 0;

  friend bool operator==(const CellRef&, const CellRef&) = default;
  friend auto operator<=>(const CellRef& a, const CellRef& b) {
    return std::tie(a.zone, a.cell) <=> std::tie(b.zone, b.cell);
  }
};

enum class Provenance { kAiProposed, kUserPinned, kUserOverridden };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kAiProposed: return "ai_proposed";
    case Provenance::kUserPinned: return "user_pinned";
    case Provenance::kUserOverridden: return "user_overridden";
  }
  return "?";
}

inline Provenance provenance_from_string(std::string_view s) {
  for (Provenance p : {Provenance::kAiProposed, Provenance::kUserPinned, Provenance::kUserOverridden})
    if (to_string(p) == s) return p;
  throw Error(ErrorCode::kInvalidDocument, "unknown provenance '" + std::string(s) + "'");
}

struct AssignmentEntry {
  std::string app;
  CellRef cell;
  Provenance provenance = Provenance::kAiProposed;
};

/// App-to-cell map. Entries keep insertion order, which is the order the
/// engine committed them.
struct Assignment {
  std::vector<AssignmentEntry> entries;
  std::vector<std::string> unassigned;

  const AssignmentEntry* find(std::string_view app) const {
    for (const AssignmentEntry& e : entries)
      if (e.app == app) return &e;
    return nullptr;
  }

  const AssignmentEntry* occupant(const CellRef& cell) const {
    for (const AssignmentEntry& e : entries)
      if (e.cell == cell) return &e;
    return nullptr;
  }

  void add(std::string app, CellRef cell, Provenance p) {
    entries.push_back({std::move(app), std::move(cell), p});
  }
};

/// Readability rule: every occupied cell must subtend at least
/// alpha_min * rows radians on both axes, with rows taken per app.
struct ReadabilityConfig {
  double alpha_min = 0.5 * 3.14159265358979323846 / 180.0;  // radians
  int default_rows = 20;
  std::map<std::string, int> rows_by_app;
  double max_scale = 3.0;

  int rows_for(std::string_view app) const {
    auto it = rows_by_app.find(std::string(app));
    return it == rows_by_app.end() ? default_rows : it->second;
  }

  double required_angle(std::string_view app) const { return alpha_min * rows_for(app); }

  static ReadabilityConfig from_catalog(const std::vector<AppDescriptor>& catalog,
                                        ReadabilityConfig base) {
    for (const AppDescriptor& a : catalog) base.rows_by_app[a.id] = a.min_rows;
    return base;
  }
  static ReadabilityConfig from_catalog(const std::vector<AppDescriptor>& catalog) {
    return from_catalog(catalog, ReadabilityConfig{});
  }
};

}  // namespace xrzone

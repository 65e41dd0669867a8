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
#include <cctype>
#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "xrzone/costmodel.hpp"
#include "xrzone/errors.hpp"
#include "xrzone/json.hpp"
#include "xrzone/layout.hpp"
#include "xrzone/types.hpp"

namespace xrzone {

/// A language-model backend: one structured payload in, one text reply out.
/// Implementations throw Error(kTimeout) when `timeout` elapses and
/// Error(kProvider) for transport failures.
class LanguageModelProvider {
 public:
  virtual ~LanguageModelProvider() = default;
  virtual std::string complete(const std::string& payload, std::chrono::milliseconds timeout) = 0;
  virtual std::string name() const = 0;
};

struct ProviderSettings {
  std::string endpoint;
  std::string api_key;
  std::string model;
  double timeout_seconds = 10.0;
  int retries = 1;
};

/// Calls the provider, retrying at most `retries` times on failure.
inline std::string complete_with_retry(LanguageModelProvider& provider, const std::string& payload,
                                       std::chrono::milliseconds timeout, int retries) {
  for (int attempt = 0;; ++attempt) {
    try {
      return provider.complete(payload, timeout);
    } catch (const Error& e) {
      if (attempt >= retries || (e.code() != ErrorCode::kTimeout && e.code() != ErrorCode::kProvider))
        throw;
    }
  }
}

// ---- keyword heuristic ------------------------------------------------------

namespace detail {

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// "coding" matches "code", "designing" matches "design": a shared prefix of
// four characters counts as a match for longer words.
inline bool words_match(const std::string& a, const std::string& b) {
  if (a == b) return true;
  if (a.size() < 4 || b.size() < 4) return false;
  return a.compare(0, 4, b, 0, 4) == 0;
}

}  // namespace detail

inline int keyword_score(const Goal& goal, const AppDescriptor& app) {
  std::vector<std::string> vocab = detail::tokenize(app.category);
  for (const std::string& s : detail::tokenize(app.name)) vocab.push_back(s);
  for (const std::string& k : app.keywords)
    for (const std::string& s : detail::tokenize(k)) vocab.push_back(s);
  int score = 0;
  for (const std::string& g : detail::tokenize(goal.text)) {
    for (const std::string& v : vocab) {
      if (detail::words_match(g, v)) {
        ++score;
        break;
      }
    }
  }
  return score;
}

/// Catalog ranked by keyword overlap with the goal. Matching apps get
/// r = min(1, 0.5 + 0.2 * matches); when nothing matches every app is
/// returned with r = 0.1, so the result is never empty.
inline RelevanceSet keyword_relevance(const Goal& goal, const std::vector<AppDescriptor>& catalog) {
  RelevanceSet out;
  out.goal = goal;
  std::vector<std::pair<int, std::size_t>> scored;
  for (std::size_t i = 0; i < catalog.size(); ++i)
    scored.emplace_back(keyword_score(goal, catalog[i]), i);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  const bool any = !scored.empty() && scored.front().first > 0;
  for (const auto& [score, i] : scored) {
    if (any && score == 0) break;
    out.entries.push_back({catalog[i].id, any ? std::min(1.0, 0.5 + 0.2 * score) : 0.1});
  }
  return out;
}

// ---- pre-stage: relevance prediction ---------------------------------------

inline Json build_relevance_prompt(const Goal& goal, const std::vector<AppDescriptor>& catalog) {
  Json apps = Json::array();
  for (const AppDescriptor& a : catalog)
    apps.push_back(Json{{"id", a.id}, {"name", a.name}, {"category", a.category}});
  return Json{
      {"task", "relevance"},
      {"goal", to_json(goal)},
      {"catalog", std::move(apps)},
      {"instruction",
       "Select the catalog applications the user is likely to need for the goal. "
       "Reply with JSON only, no prose: {\"apps\": [{\"id\": <catalog id>, \"relevance\": <0..1>}]}"}};
}

struct RelevanceResult {
  RelevanceSet relevance;
  bool fallback = false;
  std::vector<std::string> warnings;
};

/// Keeps catalog ids only (first occurrence wins) and clamps r into [0, 1].
/// Throws kInvalidDocument when the reply is not the requested schema or
/// names no usable app.
inline RelevanceResult parse_relevance_response(const std::string& text, const Goal& goal,
                                                const std::vector<AppDescriptor>& catalog) {
  const Json j = parse_json(text);
  const Json& apps = array_at(j, "apps");
  RelevanceResult out;
  out.relevance.goal = goal;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < apps.size(); ++i) {
    const std::string path = index_path("apps", i);
    const std::string id = string_at(apps[i], "id", path);
    const double r = number_at(apps[i], "relevance", path);
    const bool known = std::any_of(catalog.begin(), catalog.end(),
                                   [&](const AppDescriptor& a) { return a.id == id; });
    if (!known) {
      out.warnings.push_back("dropped unknown app '" + id + "'");
      continue;
    }
    if (!seen.insert(id).second) {
      out.warnings.push_back("dropped duplicate app '" + id + "'");
      continue;
    }
    const double clamped = std::clamp(r, 0.0, 1.0);
    if (clamped != r) out.warnings.push_back("clamped relevance of '" + id + "'");
    out.relevance.entries.push_back({id, clamped});
  }
  if (out.relevance.entries.empty())
    throw Error(ErrorCode::kInvalidDocument, "provider named no catalog application");
  return out;
}

struct RecommenderOptions {
  std::chrono::milliseconds timeout{10000};
  int retries = 1;
  /// When false, provider failures propagate instead of falling back.
  bool allow_fallback = true;
};

inline RelevanceResult predict_relevance(const Goal& goal, const std::vector<AppDescriptor>& catalog,
                                         LanguageModelProvider* provider,
                                         const RecommenderOptions& options = {}) {
  goal.validate();
  if (catalog.empty()) throw Error(ErrorCode::kDomain, "predict_relevance: empty catalog");
  if (provider != nullptr) {
    const std::string payload = canonical_dump(build_relevance_prompt(goal, catalog), -1);
    try {
      const std::string reply = complete_with_retry(*provider, payload, options.timeout, options.retries);
      return parse_relevance_response(reply, goal, catalog);
    } catch (const Error& e) {
      if (!options.allow_fallback) throw;
      RelevanceResult out{keyword_relevance(goal, catalog), true, {}};
      out.warnings.push_back(std::string("relevance fallback: ") + e.what());
      return out;
    }
  }
  RelevanceResult out{keyword_relevance(goal, catalog), true, {"no provider configured"}};
  return out;
}

// ---- stage 1 prompt -----------------------------------------------------------

inline Json readability_to_json(const ReadabilityConfig& cfg) {
  Json rows = Json::object();
  for (const auto& [app, n] : cfg.rows_by_app) rows[app] = n;
  return Json{{"alpha_min_deg", rad_to_deg(cfg.alpha_min)},
              {"default_rows", cfg.default_rows},
              {"rows_by_app", std::move(rows)},
              {"rule", "min(atan(w/d), atan(h/d)) >= alpha_min * rows for every occupied cell"}};
}

/// Stage-1 payload. `sections` always carries exactly five parts: the
/// recommended apps with scores, the zones with their layout, sizes and
/// occupied cells, the cost matrix, the readability constraints and the goal.
inline Json build_stage1_prompt(const RelevanceSet& relevance, const std::vector<ZoneSpec>& zones,
                                const Assignment& occupancy, const std::vector<CostMatrix>& costs,
                                const ReadabilityConfig& readability, const Goal& goal) {
  Json apps = Json::array();
  for (const RelevanceEntry& e : relevance.entries)
    apps.push_back(Json{{"id", e.app}, {"relevance", e.r}});

  Json zone_list = Json::array();
  for (const ZoneSpec& z : zones) {
    if (z.is_occlusion()) continue;
    Json cells = Json::array();
    for (const Cell& c : z.cells) {
      const AssignmentEntry* occ = occupancy.occupant({z.id, c.index});
      Json cj{{"index", c.index}, {"width", c.width}, {"height", c.height}};
      cj["occupant"] = occ ? Json(occ->app) : Json(nullptr);
      cells.push_back(std::move(cj));
    }
    zone_list.push_back(Json{{"id", z.id},
                             {"layout", std::string(to_string(z.kind))},
                             {"width", z.width},
                             {"height", z.height},
                             {"position", to_json(z.position)},
                             {"cells", std::move(cells)}});
  }

  Json cost_list = Json::array();
  for (const CostMatrix& c : costs) cost_list.push_back(to_json(c));

  Json sections{{"applications", std::move(apps)},
                {"zones", std::move(zone_list)},
                {"cost_matrix", std::move(cost_list)},
                {"readability", readability_to_json(readability)},
                {"goal", to_json(goal)}};
  return Json{
      {"task", "stage1_assignment"},
      {"sections", std::move(sections)},
      {"instruction",
       "Assign applications to empty cells, at most one application per cell. Lower cost "
       "entries are cheaper placements. Reply with JSON only, no prose: "
       "{\"assignment\": [{\"app\": <id>, \"zone\": <zone id>, \"cell\": <cell index>}]}"}};
}

struct ProposedCell {
  std::string app;
  CellRef cell;
};

inline std::vector<ProposedCell> parse_assignment_response(const std::string& text) {
  const Json j = parse_json(text);
  const Json& list = array_at(j, "assignment");
  std::vector<ProposedCell> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = index_path("assignment", i);
    out.push_back({string_at(list[i], "app", p),
                   {string_at(list[i], "zone", p), static_cast<int>(integer_at(list[i], "cell", p))}});
  }
  return out;
}

// ---- mock provider --------------------------------------------------------------

/// Deterministic provider backed by a fixture table keyed by goal text.
/// Fixture document: {"relevance": {goal: reply}, "assignment": {goal: reply}}
/// where each reply is the JSON object the provider returns verbatim.
/// Unknown goals get the catalog ranked by keyword match, and an empty
/// assignment (which the caller backfills).
class MockProvider : public LanguageModelProvider {
 public:
  enum class Failure { kNone, kOffline, kTimeout, kMalformed };

  MockProvider() = default;
  explicit MockProvider(Json fixtures) : fixtures_(std::move(fixtures)) {}

  static std::shared_ptr<MockProvider> from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kNotFound, "cannot open mock fixtures '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return std::make_shared<MockProvider>(parse_json(ss.str()));
  }

  void set_failure(Failure f) {
    std::lock_guard lock(mu_);
    failure_ = f;
  }
  void set_latency(std::chrono::milliseconds latency) {
    std::lock_guard lock(mu_);
    latency_ = latency;
  }
  void set_reply(const std::string& task, const std::string& goal, Json reply) {
    std::lock_guard lock(mu_);
    fixtures_[task][goal] = std::move(reply);
  }
  int calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }

  std::string name() const override { return "mock"; }

  std::string complete(const std::string& payload, std::chrono::milliseconds timeout) override {
    Failure failure;
    std::chrono::milliseconds latency;
    {
      std::lock_guard lock(mu_);
      ++calls_;
      failure = failure_;
      latency = latency_;
    }
    if (failure == Failure::kOffline) throw Error(ErrorCode::kProvider, "mock provider offline");
    if (failure == Failure::kTimeout || latency > timeout) {
      std::this_thread::sleep_for(std::min(latency, timeout));
      throw Error(ErrorCode::kTimeout, "mock provider timed out");
    }
    if (latency.count() > 0) std::this_thread::sleep_for(latency);
    if (failure == Failure::kMalformed) return "Sure! Here is a layout you might like.";

    const Json request = parse_json(payload);
    const std::string task = string_at(request, "task");
    if (task == "relevance") {
      const std::string goal = string_at(require(request, "goal"), "text", "goal");
      if (const std::optional<Json> r = lookup("relevance", goal)) return canonical_dump(*r, -1);
      std::vector<AppDescriptor> catalog;
      for (const Json& a : array_at(request, "catalog"))
        catalog.push_back(app_from_json(a, "catalog"));
      Json apps = Json::array();
      for (const RelevanceEntry& e : keyword_relevance(Goal{goal, GoalSource::kTyped}, catalog).entries)
        apps.push_back(Json{{"id", e.app}, {"relevance", e.r}});
      return canonical_dump(Json{{"apps", std::move(apps)}}, -1);
    }
    if (task == "stage1_assignment") {
      const Json& sections = require(request, "sections");
      const std::string goal = string_at(require(sections, "goal", "sections"), "text", "sections.goal");
      if (const std::optional<Json> r = lookup("assignment", goal)) return canonical_dump(*r, -1);
      return R"({"assignment":[]})";
    }
    throw Error(ErrorCode::kProvider, "mock provider: unknown task '" + task + "'");
  }

 private:
  std::optional<Json> lookup(const std::string& task, const std::string& goal) const {
    std::lock_guard lock(mu_);
    auto t = fixtures_.find(task);
    if (t == fixtures_.end() || !t->is_object()) return std::nullopt;
    auto g = t->find(goal);
    if (g == t->end()) return std::nullopt;
    return *g;
  }

  mutable std::mutex mu_;
  Json fixtures_ = Json::object();
  Failure failure_ = Failure::kNone;
  std::chrono::milliseconds latency_{0};
  int calls_ = 0;
};

}  // namespace xrzone

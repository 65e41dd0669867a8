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

#include <gtest/gtest.h>

#include <thread>

#include "xrzone/cli.hpp"
#include "xrzone/service.hpp"
#include "xrzone/session.hpp"
#include "xrzone/wire.hpp"

namespace xrzone {
namespace {

const std::string kData = XRZONE_DATA_DIR;
const Goal kGoal = Goal::typed("coding a web game");

cli::Loaded demo() { return cli::load(kData + "/demo_scenario.json", {}); }

std::vector<AppDescriptor> catalog() {
  return catalog_from_json(parse_json(cli::read_file(kData + "/catalog.json")), "");
}

std::shared_ptr<MockProvider> fixtures() { return MockProvider::from_file(kData + "/mock_fixtures.json"); }

WorkspaceState with_pending(WorkspaceState s, const Proposal& p) {
  s.pending = p;
  return s;
}

struct DemoFixture : ::testing::Test {
  cli::Loaded in = demo();
  WorkspaceState state = in.scenario.workspace;
  Proposal proposal =
      plan_recommendation(state, kGoal, in.scenario.catalog, in.config.planner, in.provider.get());
};

// ---- direct manipulation ---------------------------------------------------------------

TEST_F(DemoFixture, EveryOpBumpsTheRevisionByOne) {
  const std::uint64_t r0 = state.revision;
  WorkspaceState s = add_window(state, "notes", FreePose{});
  EXPECT_EQ(s.revision, r0 + 1);
  s = drag_window_in(s, "notes", {"left", 0});
  EXPECT_EQ(s.revision, r0 + 2);
  s = set_zone_locked(s, "left", true);
  EXPECT_EQ(s.revision, r0 + 3);
  s = move_inner_knob(s, "main", KnobAxis::kVertical, 0.8, 0.15).state;
  EXPECT_EQ(s.revision, r0 + 4);
}

TEST_F(DemoFixture, DuplicateWindowIsRejected) {
  const WorkspaceState s = add_window(state, "notes", FreePose{});
  EXPECT_THROW(add_window(s, "notes", FreePose{}), Error);
}

TEST_F(DemoFixture, DragInAndOut) {
  WorkspaceState s = add_window(state, "notes", FreePose{});
  s = add_window(s, "mail", FreePose{Vec3(0.5, 1.6, 2.5)});
  s = drag_window_in(s, "notes", {"left", 1});
  EXPECT_EQ(s.find_zone("left")->cells[1].occupant, "notes");
  EXPECT_EQ(s.find_window("notes")->provenance, Provenance::kUserPinned);
  try {
    drag_window_in(s, "mail", {"left", 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOccupied);
  }
  try {
    drag_window_in(s, "mail", {"desk", 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntrusion);
  }
  const Cell cell = s.find_zone("left")->cells[1];
  s = drag_window_out(s, "notes", Vec3(0, 1.6, 3));
  const WindowInstance* w = s.find_window("notes");
  ASSERT_TRUE(w->free_pose);
  EXPECT_FALSE(w->host);
  EXPECT_DOUBLE_EQ(w->free_pose->width, cell.width);
  EXPECT_DOUBLE_EQ(w->free_pose->height, cell.height);
  EXPECT_FALSE(s.find_zone("left")->cells[1].occupant);
}

TEST_F(DemoFixture, DeletingAZoneFreesItsWindows) {
  WorkspaceState s = add_window(state, "notes", FreePose{});
  s = drag_window_in(s, "notes", {"top", 0});
  s = delete_zone(s, "top");
  EXPECT_FALSE(s.find_zone("top"));
  EXPECT_TRUE(s.find_window("notes")->free_pose);
  EXPECT_NO_THROW(validate_state(s));
}

TEST_F(DemoFixture, TranslatedZoneNeverLandsOnAnOcclusion) {
  const ZoneSpec& desk = *state.find_occlusion("desk");
  const WorkspaceState s = translate_zone(state, "right", desk.position);
  EXPECT_FALSE(footprints_overlap(angular_footprint(*s.find_zone("right"), s.pose),
                                  angular_footprint(desk, s.pose)));
}

TEST_F(DemoFixture, EventsMustStayOrdered) {
  const double last = state.log.back().timestamp;
  EXPECT_THROW(ingest_events(state, {{last - 1.0, EventKind::kFocus, "ide", std::nullopt}}), Error);
  const WorkspaceState s = ingest_events(state, {{last + 1.0, EventKind::kFocus, "ide", std::nullopt}});
  EXPECT_EQ(s.log.size(), state.log.size() + 1);
}

// ---- proposals -------------------------------------------------------------------------

TEST_F(DemoFixture, ProposalUsesFixtureAndIsComplete) {
  EXPECT_EQ(proposal.status, ProposalStatus::kReady);
  EXPECT_FALSE(proposal.fallback());
  EXPECT_EQ(proposal.relevance.entries.size(), 8u);
  EXPECT_EQ(proposal.assignment.entries.size(), 8u);
  EXPECT_EQ(proposal.sizing.size(), 4u);
  EXPECT_EQ(proposal.base_revision, state.revision);
  for (const AssignmentEntry& e : proposal.assignment.entries)
    EXPECT_EQ(e.provenance, Provenance::kAiProposed);
}

TEST_F(DemoFixture, PlanningDoesNotMutate) {
  const std::string before = canonical_dump(to_json(state));
  plan_recommendation(state, kGoal, in.scenario.catalog, in.config.planner, in.provider.get());
  EXPECT_EQ(canonical_dump(to_json(state)), before);
}

TEST_F(DemoFixture, AcceptAllHostsEveryApp) {
  const Resolution r = resolve_proposal(with_pending(state, proposal), accept_all(proposal));
  EXPECT_EQ(r.record.apps_accepted, 8);
  EXPECT_EQ(r.record.apps_rejected, 0);
  EXPECT_FALSE(r.state.pending);
  EXPECT_EQ(r.state.revision, state.revision + 1);
  for (const AssignmentEntry& e : proposal.assignment.entries) {
    const WindowInstance* w = r.state.find_window(e.app);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->host, e.cell);
    EXPECT_EQ(w->provenance, Provenance::kAiProposed);
  }
  EXPECT_NO_THROW(validate_state(r.state));
}

TEST_F(DemoFixture, DeclineAllLeavesLayoutAlone) {
  const Resolution r = resolve_proposal(with_pending(state, proposal), decline_all(proposal));
  EXPECT_EQ(r.record.apps_rejected, 8);
  EXPECT_EQ(r.record.layouts_adjusted, 0);
  EXPECT_TRUE(r.state.windows.empty());
  for (std::size_t k = 0; k < state.zones.size(); ++k) {
    EXPECT_EQ(r.state.zones[k].theta, state.zones[k].theta);
    EXPECT_EQ(r.state.zones[k].width, state.zones[k].width);
  }
}

TEST_F(DemoFixture, MixedDecisions) {
  const AssignmentEntry& first = proposal.assignment.entries[0];
  const AssignmentEntry& second = proposal.assignment.entries[1];
  // Overrides need a cell the proposal leaves empty.
  std::optional<CellRef> spare;
  for (const ZoneSpec& z : state.zones)
    for (const Cell& c : z.cells)
      if (!spare && !proposal.assignment.occupant({z.id, c.index})) spare = CellRef{z.id, c.index};
  Decisions d;
  d.entries.push_back({first.app, Decision::kAccept, {}});
  d.entries.push_back({second.app, Decision::kDecline, {}});
  for (std::size_t k = 2; k < proposal.assignment.entries.size(); ++k)
    d.entries.push_back({proposal.assignment.entries[k].app, Decision::kDecline, {}});
  if (spare) d.entries[1] = {second.app, Decision::kOverride, spare};

  const Resolution r = resolve_proposal(with_pending(state, proposal), d);
  EXPECT_EQ(r.record.apps_accepted, 1);
  EXPECT_EQ(r.state.find_window(first.app)->host, first.cell);
  if (spare) {
    EXPECT_EQ(r.record.apps_overridden, 1);
    EXPECT_EQ(r.state.find_window(second.app)->host, spare);
    EXPECT_EQ(r.state.find_window(second.app)->provenance, Provenance::kUserOverridden);
  } else {
    EXPECT_FALSE(r.state.find_window(second.app));
  }
}

TEST_F(DemoFixture, ZoneBatchDecisions) {
  Decisions d;
  for (const ZoneSpec& z : state.zones) d.zone_batch[z.id] = z.id == "main" ? Decision::kAccept : Decision::kDecline;
  const Resolution r = resolve_proposal(with_pending(state, proposal), d);
  for (const AcceptanceEntry& a : r.record.decisions)
    EXPECT_EQ(a.decision, a.proposed.zone == "main" ? Decision::kAccept : Decision::kDecline) << a.app;
}

TEST_F(DemoFixture, ResolveErrors) {
  try {
    resolve_proposal(state, accept_all(proposal));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoPending);
  }
  Decisions partial = accept_all(proposal);
  partial.entries.pop_back();
  try {
    resolve_proposal(with_pending(state, proposal), partial);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompleteDecisions);
  }
  Decisions bad = accept_all(proposal);
  bad.entries[0] = {bad.entries[0].app, Decision::kOverride, proposal.assignment.entries[1].cell};
  bad.entries[1].decision = Decision::kAccept;
  EXPECT_THROW(resolve_proposal(with_pending(state, proposal), bad), Error);
}

// ---- session ---------------------------------------------------------------------------

WorkspaceSession::RecommendRequest request(const cli::Loaded& in, std::shared_ptr<LanguageModelProvider> p) {
  return {kGoal, in.scenario.catalog, in.config.planner, std::move(p)};
}

TEST(Session, StaleRevisionLeavesStateAlone) {
  const cli::Loaded in = demo();
  WorkspaceSession s(in.scenario.workspace);
  const std::uint64_t r = s.revision();
  try {
    s.mutate(r + 7, [](const WorkspaceState& st) { return set_zone_locked(st, "main", true); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStaleRevision);
  }
  EXPECT_EQ(s.revision(), r);
  EXPECT_FALSE(s.snapshot().find_zone("main")->locked);
}

TEST(Session, UndoRestoresAndStaysBounded) {
  const cli::Loaded in = demo();
  WorkspaceSession s(in.scenario.workspace);
  s.mutate(std::nullopt, [](const WorkspaceState& st) { return set_zone_locked(st, "main", true); });
  const std::uint64_t r = s.revision();
  const WorkspaceState back = s.undo(r);
  EXPECT_FALSE(back.find_zone("main")->locked);
  EXPECT_EQ(back.revision, r + 1);
  for (int k = 0; k < 60; ++k)
    s.mutate(std::nullopt, [k](const WorkspaceState& st) { return set_zone_locked(st, "main", k % 2 == 0); });
  EXPECT_EQ(s.undo_depth(), WorkspaceSession::kUndoDepth);
  EXPECT_THROW(WorkspaceSession(in.scenario.workspace).undo(std::nullopt), Error);
}

TEST(Session, SecondRecommendIsRejected) {
  const cli::Loaded in = demo();
  WorkspaceSession s(in.scenario.workspace);
  const Proposal p = s.recommend(request(in, in.provider));
  EXPECT_EQ(p.id, "proposal-1");
  try {
    s.recommend(request(in, in.provider));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPendingExists);
  }
  const Resolution r = s.resolve(accept_all(p), s.revision());
  EXPECT_EQ(r.record.apps_accepted, 8);
  EXPECT_EQ(s.recommend(request(in, in.provider)).id, "proposal-2");
}

TEST(Session, AsyncPendingBlocksMutation) {
  const cli::Loaded in = demo();
  auto slow = fixtures();
  slow->set_latency(std::chrono::milliseconds(300));
  WorkspaceSession s(in.scenario.workspace);
  const std::uint64_t r = s.revision();
  const Proposal placeholder = s.recommend_async(request(in, slow));
  EXPECT_EQ(placeholder.status, ProposalStatus::kPending);
  EXPECT_THROW(s.recommend(request(in, slow)), Error);
  EXPECT_THROW(s.mutate(r, [](const WorkspaceState& st) { return set_zone_locked(st, "main", true); }), Error);
  EXPECT_EQ(s.revision(), r);
  s.wait();
  EXPECT_EQ(s.snapshot().pending->status, ProposalStatus::kReady);
}

TEST(Session, FailedAsyncProposalCanBeRetried) {
  const cli::Loaded in = demo();
  auto broken = fixtures();
  broken->set_failure(MockProvider::Failure::kOffline);
  WorkspaceSession s(in.scenario.workspace);
  auto req = request(in, broken);
  req.config.recommender.allow_fallback = false;
  s.recommend_async(req);
  s.wait();
  const WorkspaceState snap = s.snapshot();
  ASSERT_TRUE(snap.pending);
  EXPECT_EQ(snap.pending->status, ProposalStatus::kFailed);
  EXPECT_FALSE(snap.pending->error.empty());
  EXPECT_EQ(s.recommend(request(in, fixtures())).status, ProposalStatus::kReady);
}

// ---- wire ---------------------------------------------------------------------------

TEST_F(DemoFixture, StateRoundTripIsCanonical) {
  const std::string a = canonical_dump(to_json(with_pending(state, proposal)));
  const std::string b = canonical_dump(to_json(state_from_json(parse_json(a))));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.back(), '\n');
}

TEST(Wire, EnvelopeChecks) {
  EXPECT_THROW(expect_envelope(R"({"schema_version":"2","kind":"op","body":{}})", "op"), Error);
  EXPECT_THROW(expect_envelope(R"({"schema_version":"1","kind":"banana","body":{}})", "op"), Error);
  EXPECT_THROW(expect_envelope(R"({"schema_version":"1","kind":"op","body":{}})", "decisions"), Error);
  EXPECT_THROW(expect_envelope("not json", "op"), Error);
  EXPECT_EQ(expect_envelope(wrap("op", Json{{"op", "undo"}}, "r1"), "op").request_id, "r1");
}

TEST(Wire, ErrorBodyNamesTheField) {
  const Json j = error_body(Error(ErrorCode::kInvalidDocument, "field 'zones[2].width': expected number"));
  EXPECT_EQ(j["code"], "invalid_document");
  EXPECT_EQ(j["field"], "zones[2].width");
  EXPECT_TRUE(error_body(Error(ErrorCode::kDomain, "bad")).at("field").is_null());
}

TEST(Wire, DecisionVerbs) {
  const Json j = parse_json(R"({"entries":[{"app":"a","decision":"accept"},)"
                            R"({"app":"b","decision":"override","target":{"zone":"z","cell":1}}],)"
                            R"("zones":{"q":"decline"}})");
  const Decisions d = decisions_from_json(j);
  ASSERT_EQ(d.entries.size(), 2u);
  EXPECT_EQ(d.entries[1].target, (CellRef{"z", 1}));
  EXPECT_EQ(d.zone_batch.at("q"), Decision::kDecline);
  EXPECT_EQ(canonical_dump(to_json(decisions_from_json(to_json(d)))), canonical_dump(to_json(d)));
  EXPECT_THROW(decisions_from_json(parse_json(R"({"entries":[{"app":"a","decision":"maybe"}]})")), Error);
}

TEST(Wire, ConfigOverlay) {
  const EngineConfig c = config_from_json(parse_json(
      R"({"engine":"greedy","readability":{"alpha_min_deg":1.0},"recommender":{"timeout_seconds":2.5}})"));
  EXPECT_EQ(c.planner.engine, Engine::kGreedy);
  EXPECT_NEAR(c.planner.sizing.readability.alpha_min, deg_to_rad(1.0), 1e-15);
  EXPECT_EQ(c.planner.recommender.timeout.count(), 2500);
  EXPECT_THROW(config_from_json(parse_json(R"({"sizing":{"omega_margin":0.7}})")), Error);
  EXPECT_THROW(config_from_json(parse_json(R"({"recommender":{"retries":3}})")), Error);
}

// ---- service --------------------------------------------------------------------------

struct ServiceFixture : ::testing::Test {
  std::shared_ptr<MockProvider> provider = fixtures();
  Service svc{EngineConfig{}, catalog(), provider};
  std::string id;

  void SetUp() override {
    const HttpResponse r = svc.handle("POST", "/v1/workspaces", wrap("workspace_state", to_json(demo().scenario.workspace)));
    ASSERT_EQ(r.status, 201) << r.body;
    id = expect_envelope(r.body, "session").body.at("id").get<std::string>();
  }

  std::string url(const std::string& action = {}) const {
    return "/v1/workspaces/" + id + (action.empty() ? "" : "/" + action);
  }
  Json state() { return expect_envelope(svc.handle("GET", url(), "").body, "workspace_state").body; }
  HttpResponse op(Json body) { return svc.handle("POST", url("ops"), wrap("op", std::move(body))); }
  HttpResponse recommend(const std::string& query = {}) {
    return svc.handle("POST", url("recommend") + query, wrap("recommend", Json{{"goal", kGoal.text}}));
  }
};

TEST_F(ServiceFixture, CreateAndGet) {
  EXPECT_EQ(state()["revision"], 0);
  EXPECT_EQ(svc.handle("GET", "/v1/workspaces/nope", "").status, 404);
  EXPECT_EQ(svc.handle("GET", "/v2/things", "").status, 404);
  EXPECT_EQ(svc.handle("POST", "/v1/workspaces", wrap("workspace_state", to_json(demo().scenario.workspace))).status, 409);
  EXPECT_EQ(svc.handle("POST", "/v1/workspaces", "{").status, 400);
}

TEST_F(ServiceFixture, OpsCheckTheRevision) {
  HttpResponse r = op({{"op", "lock_zone"}, {"zone", "main"}, {"locked", true}, {"expected_revision", 0}});
  EXPECT_EQ(r.status, 200) << r.body;
  const std::string before = canonical_dump(state());
  r = op({{"op", "lock_zone"}, {"zone", "main"}, {"locked", false}, {"expected_revision", 0}});
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(expect_envelope(r.body, "error").body["code"], "stale_revision");
  EXPECT_EQ(canonical_dump(state()), before);
  EXPECT_EQ(op({{"op", "lock_zone"}, {"zone", "main"}, {"locked", false}}).status, 400);
  EXPECT_EQ(op({{"op", "fly"}, {"expected_revision", 1}}).status, 400);
}

TEST_F(ServiceFixture, InnerKnobReportsClamping) {
  const HttpResponse r =
      op({{"op", "inner_knob"}, {"zone", "main"}, {"axis", "vertical"}, {"value", 1.59}, {"expected_revision", 0}});
  ASSERT_EQ(r.status, 200) << r.body;
  const Json b = expect_envelope(r.body, "op_result").body;
  EXPECT_TRUE(b["clamped"].get<bool>());
  EXPECT_EQ(b["revision"], 1);
}

TEST_F(ServiceFixture, DropOnOcclusionIs422) {
  op({{"op", "add_window"}, {"app", "notes"}, {"free", to_json(FreePose{})}, {"expected_revision", 0}});
  const HttpResponse r =
      op({{"op", "drag_in"}, {"app", "notes"}, {"target", {{"zone", "desk"}, {"cell", 0}}}, {"expected_revision", 1}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(state()["revision"], 1);
}

TEST_F(ServiceFixture, RecommendResolveFlow) {
  HttpResponse r = recommend();
  ASSERT_EQ(r.status, 200) << r.body;
  const Proposal p = proposal_from_json(expect_envelope(r.body, "proposal").body, "");
  EXPECT_EQ(p.assignment.entries.size(), 8u);
  EXPECT_EQ(recommend().status, 409);

  Json partial = to_json(accept_all(p));
  partial["entries"].erase(0);
  r = svc.handle("POST", url("resolve"), wrap("decisions", partial));
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(expect_envelope(r.body, "error").body["code"], "incomplete_decisions");

  r = svc.handle("POST", url("resolve"), wrap("decisions", to_json(accept_all(p))));
  ASSERT_EQ(r.status, 200) << r.body;
  const Json res = expect_envelope(r.body, "resolution").body;
  EXPECT_EQ(acceptance_from_json(res["acceptance"]).apps_accepted, 8);
  EXPECT_EQ(svc.handle("POST", url("resolve"), wrap("decisions", to_json(accept_all(p)))).status, 409);
}

TEST_F(ServiceFixture, AsyncRecommendAnswers202Then409) {
  provider->set_latency(std::chrono::milliseconds(300));
  HttpResponse r = recommend("?async=1");
  ASSERT_EQ(r.status, 202) << r.body;
  const std::string before = canonical_dump(state());
  EXPECT_EQ(recommend().status, 409);
  EXPECT_EQ(op({{"op", "lock_zone"}, {"zone", "main"}, {"locked", true}, {"expected_revision", 0}}).status, 409);
  EXPECT_EQ(canonical_dump(state()), before);
  svc.session(id)->wait();
  EXPECT_EQ(state()["pending"]["status"], "ready");
}

TEST_F(ServiceFixture, EventsAppend) {
  const std::size_t before = state()["log"].size();
  const double t = state()["log"].back()["timestamp"].get<double>() + 1.0;
  const HttpResponse r = svc.handle("POST", url("events"),
                                    wrap("event_batch", Json{{"events", {{{"timestamp", t}, {"kind", "focus"}, {"app", "ide"}}}}}));
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(expect_envelope(r.body, "event_batch").body["log_size"], before + 1);
}

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::kPendingExists), 409);
  EXPECT_EQ(http_status(ErrorCode::kIntrusion), 422);
  EXPECT_EQ(http_status(ErrorCode::kInvalidDocument), 400);
  EXPECT_EQ(http_status(ErrorCode::kNotFound), 404);
  EXPECT_EQ(http_status(ErrorCode::kProvider), 502);
  EXPECT_EQ(http_status(ErrorCode::kTimeout), 504);
}

// ---- headless runner -------------------------------------------------------------------

TEST(Cli, DemoMatchesTheGolden) {
  const cli::Loaded in = demo();
  const std::string out = cli::render(cli::run(in, {}), cli::Format::kJson);
  EXPECT_EQ(out, cli::read_file(kData + "/golden/demo_report.json"));
  const Report r = report_from_json(expect_envelope(out, "report").body);
  EXPECT_EQ(r.acceptance.apps_accepted, 8);
}

TEST(Cli, OtherFormats) {
  const Report r = cli::run(demo(), {});
  const std::string csv = cli::render(r, cli::Format::kCsv);
  EXPECT_EQ(csv.rfind("metric,value\n", 0), 0u);
  EXPECT_NE(cli::render(r, cli::Format::kText).find("main"), std::string::npos);
}

TEST(Cli, OracleRegretIsZero) {
  const cli::CompareTable t = cli::compare(demo(), {"greedy", "oracle"}, 20, 7, {});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_GE(t.rows[0].mean_regret, 0.0);
  EXPECT_EQ(t.rows[1].mean_regret, 0.0);
  EXPECT_FALSE(t.rows[0].runtime_ms);
}

TEST(Cli, MissingInputIsAnInputError) {
  EXPECT_THROW(cli::load(kData + "/nope.json", {}), cli::InputError);
}

}  // namespace
}  // namespace xrzone

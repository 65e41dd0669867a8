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

#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "xrzone/workspace.hpp"

namespace xrzone {

/// One workspace with serialized mutation, undo and an off-thread
/// recommendation slot. Every failed call leaves the state untouched.
class WorkspaceSession {
 public:
  static constexpr std::size_t kUndoDepth = 50;

  explicit WorkspaceSession(WorkspaceState initial) : state_(std::move(initial)) {
    validate_state(state_);
  }

  ~WorkspaceSession() {
    if (worker_.joinable()) worker_.join();
  }

  WorkspaceSession(const WorkspaceSession&) = delete;
  WorkspaceSession& operator=(const WorkspaceSession&) = delete;

  WorkspaceState snapshot() const {
    std::lock_guard lock(mu_);
    return state_;
  }

  std::uint64_t revision() const {
    std::lock_guard lock(mu_);
    return state_.revision;
  }

  /// Applies `op` to the current state when `expected` matches the revision.
  WorkspaceState mutate(std::optional<std::uint64_t> expected,
                        const std::function<WorkspaceState(const WorkspaceState&)>& op) {
    std::lock_guard lock(mu_);
    check_revision(expected);
    if (state_.pending && state_.pending->status == ProposalStatus::kPending)
      throw Error(ErrorCode::kPendingExists, "a recommendation is being computed");
    WorkspaceState next = op(state_);
    commit(std::move(next));
    return state_;
  }

  WorkspaceState undo(std::optional<std::uint64_t> expected) {
    std::lock_guard lock(mu_);
    check_revision(expected);
    if (history_.empty()) throw Error(ErrorCode::kNotFound, "nothing to undo");
    WorkspaceState prev = std::move(history_.back());
    history_.pop_back();
    // Revisions only move forward so clients can detect the change.
    prev.revision = state_.revision + 1;
    prev.proposal_seq = state_.proposal_seq;
    prev.log = state_.log;
    prev.pending.reset();
    state_ = std::move(prev);
    return state_;
  }

  std::size_t undo_depth() const {
    std::lock_guard lock(mu_);
    return history_.size();
  }

  /// Telemetry never enters the undo history.
  std::size_t ingest(const std::vector<InteractionEvent>& events) {
    std::lock_guard lock(mu_);
    state_ = ingest_events(state_, events);
    return events.size();
  }

  struct RecommendRequest {
    Goal goal;
    std::vector<AppDescriptor> catalog;
    PlannerConfig config;
    std::shared_ptr<LanguageModelProvider> provider;
  };

  /// Synchronous: returns the ready proposal, which is also stored as pending.
  Proposal recommend(RecommendRequest req) {
    auto [snap, id] = reserve(req.goal);
    try {
      Proposal p = plan_recommendation(snap, req.goal, req.catalog, req.config, req.provider.get(), id);
      std::lock_guard lock(mu_);
      state_.pending = p;
      return p;
    } catch (...) {
      std::lock_guard lock(mu_);
      if (state_.pending && state_.pending->id == id) state_.pending.reset();
      --state_.proposal_seq;
      throw;
    }
  }

  /// Asynchronous: returns the pending placeholder immediately; poll with
  /// snapshot(). Failures are recorded on the proposal.
  Proposal recommend_async(RecommendRequest req) {
    auto [snap, id] = reserve(req.goal);
    Proposal placeholder;
    {
      std::lock_guard lock(mu_);
      placeholder = *state_.pending;
    }
    if (worker_.joinable()) worker_.join();
    worker_ = std::thread([this, req = std::move(req), snap = std::move(snap), id = id]() {
      Proposal p;
      try {
        p = plan_recommendation(snap, req.goal, req.catalog, req.config, req.provider.get(), id);
      } catch (const std::exception& e) {
        p.id = id;
        p.goal = req.goal;
        p.base_revision = snap.revision;
        p.engine = std::string(to_string(req.config.engine));
        p.status = ProposalStatus::kFailed;
        p.error = e.what();
      }
      std::lock_guard lock(mu_);
      if (state_.pending && state_.pending->id == id) state_.pending = std::move(p);
    });
    return placeholder;
  }

  /// Blocks until any in-flight recommendation has finished.
  void wait() {
    if (worker_.joinable()) worker_.join();
  }

  Resolution resolve(const Decisions& decisions, std::optional<std::uint64_t> expected = {}) {
    std::lock_guard lock(mu_);
    check_revision(expected);
    Resolution r = resolve_proposal(state_, decisions);
    commit(r.state);
    r.state = state_;
    return r;
  }

 private:
  void check_revision(std::optional<std::uint64_t> expected) const {
    if (expected && *expected != state_.revision)
      throw Error(ErrorCode::kStaleRevision, "expected revision " + std::to_string(*expected) +
                                                 ", workspace is at " + std::to_string(state_.revision));
  }

  void commit(WorkspaceState next) {
    validate_state(next);
    WorkspaceState prev = std::move(state_);
    prev.pending.reset();
    history_.push_back(std::move(prev));
    if (history_.size() > kUndoDepth) history_.pop_front();
    state_ = std::move(next);
  }

  std::pair<WorkspaceState, std::string> reserve(const Goal& goal) {
    goal.validate();
    std::lock_guard lock(mu_);
    if (state_.pending && state_.pending->status != ProposalStatus::kFailed)
      throw Error(ErrorCode::kPendingExists, "workspace already has proposal '" + state_.pending->id + "'");
    const std::string id = "proposal-" + std::to_string(++state_.proposal_seq);
    WorkspaceState snap = state_;
    snap.pending.reset();
    Proposal placeholder;
    placeholder.id = id;
    placeholder.goal = goal;
    placeholder.base_revision = state_.revision;
    placeholder.status = ProposalStatus::kPending;
    state_.pending = std::move(placeholder);
    return {std::move(snap), id};
  }

  mutable std::mutex mu_;
  WorkspaceState state_;
  std::deque<WorkspaceState> history_;
  std::thread worker_;
};

}  // namespace xrzone

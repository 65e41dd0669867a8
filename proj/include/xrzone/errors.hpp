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

#include <stdexcept>
#include <string>
#include <string_view>

namespace xrzone {

enum class ErrorCode {
  kDomain,           // non-positive size, coincident points, ...
  kDegenerateCell,   // split point on a zone boundary
  kNotFound,
  kOccupied,
  kIntrusion,        // target is an occlusion-free zone
  kUnresolvable,     // no conflict-free bearing exists
  kOverlap,          // occlusion zones may not overlap
  kPendingExists,
  kNoPending,
  kIncompleteDecisions,
  kStaleRevision,
  kDuplicate,
  kTooLarge,         // exhaustive search budget exceeded
  kInvalidDocument,
  kProvider,
  kTimeout,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kDegenerateCell: return "degenerate_cell";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kOccupied: return "occupied";
    case ErrorCode::kIntrusion: return "intrusion";
    case ErrorCode::kUnresolvable: return "unresolvable";
    case ErrorCode::kOverlap: return "overlap";
    case ErrorCode::kPendingExists: return "pending_exists";
    case ErrorCode::kNoPending: return "no_pending";
    case ErrorCode::kIncompleteDecisions: return "incomplete_decisions";
    case ErrorCode::kStaleRevision: return "stale_revision";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kTooLarge: return "too_large";
    case ErrorCode::kInvalidDocument: return "invalid_document";
    case ErrorCode::kProvider: return "provider";
    case ErrorCode::kTimeout: return "timeout";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xrzone

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "pipebench/review/store.hpp"

namespace pipebench::review {

/// Rubric shown to reviewers (criterion definitions, scales, weights).
nlohmann::json rubric();

/// Endpoint bodies, shared by the HTTP server and the CLI. Each takes and
/// returns the JSON payloads of the matching route; reviewer-facing payloads
/// carry slot labels only, never model identifiers.
namespace api {
ReviewScores parse_scores(const nlohmann::json& j);
nlohmann::json create_session(ReviewStore& store, const nlohmann::json& body);  // POST /sessions
nlohmann::json next_item(const ReviewStore& store, const std::string& session_id);  // GET /sessions/{id}/next
nlohmann::json submit_scores(ReviewStore& store, const std::string& session_id,
                             const nlohmann::json& body);                // POST /sessions/{id}/scores
nlohmann::json report(const ReviewStore& store, const std::string& caseset);  // GET /reports/{caseset}
}  // namespace api

/// HTTP JSON API over a ReviewStore:
///   POST /sessions, GET /sessions/{id}/next, POST /sessions/{id}/scores,
///   GET /reports/{caseset}, GET /rubric.
class ReviewServer {
 public:
  explicit ReviewServer(ReviewStore& store);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pipebench::review

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/evalengine/metrics.hpp"

namespace pipebench::review {

using evalengine::ReviewScores;

/// Errors map onto HTTP statuses: not_found 404, invalid 400, conflict 409.
class ReviewError : public std::runtime_error {
 public:
  enum class Kind { not_found, invalid, conflict };
  ReviewError(Kind kind, const std::string& what, std::vector<corpus::Violation> violations = {})
      : std::runtime_error(what), kind_(kind), violations_(std::move(violations)) {}
  Kind kind() const { return kind_; }
  const std::vector<corpus::Violation>& violations() const { return violations_; }

 private:
  Kind kind_;
  std::vector<corpus::Violation> violations_;
};

struct CaseInput {
  std::string id;
  std::string question;
};

struct Slot {
  std::string label;
  std::string model_id;  // server side only
  std::string text;

  bool operator==(const Slot&) const = default;
};

struct SessionItem {
  std::string item_id;  // case id
  std::string question;
  std::vector<Slot> slots;  // presentation order

  bool operator==(const SessionItem&) const = default;
};

enum class SessionStatus { open, complete };

struct ReviewSession {
  static constexpr std::string_view kind = "review_session";

  std::string id;
  std::string caseset;
  std::string reviewer;
  std::uint64_t seed = 0;
  std::vector<SessionItem> items;  // presentation order
  std::int64_t cursor = 0;
  SessionStatus status = SessionStatus::open;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const ReviewSession&) const = default;
};

void to_json(nlohmann::json& j, const ReviewSession& r);
void from_json(const nlohmann::json& j, ReviewSession& r);
std::vector<corpus::Violation> validate_record(const ReviewSession& r);

struct ReviewSubmission {
  static constexpr std::string_view kind = "review_submission";

  std::string id;  // "<session>/<item>/<slot>"
  std::string session_id;
  std::string item_id;
  std::string slot;
  std::string reviewer;
  ReviewScores scores;
  std::string timestamp;  // ISO-8601 UTC; audit only, never aggregated
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const ReviewSubmission&) const = default;
};

void to_json(nlohmann::json& j, const ReviewSubmission& r);
void from_json(const nlohmann::json& j, ReviewSubmission& r);
std::vector<corpus::Violation> validate_record(const ReviewSubmission& r);

/// What a reviewer sees: no model identifiers.
struct ReviewItemView {
  std::string item_id;
  std::string question;
  std::vector<std::pair<std::string, std::string>> slots;  // label, text
  std::size_t item_index = 0;
  std::size_t item_count = 0;
  std::size_t scored_slots = 0;  // on this item
};

nlohmann::json to_json(const ReviewItemView& v);

/// Builds a session: item order and per-item slot order are permutations
/// drawn from (seed, reviewer). Throws ReviewError(invalid) when a case has
/// no outputs or an output names an unknown case.
ReviewSession make_session(std::string id, std::string caseset, std::string reviewer, std::uint64_t seed,
                           const std::vector<CaseInput>& cases, const std::vector<corpus::ResponseRecord>& outputs);

struct ModelAggregate {
  std::size_t submissions = 0;
  std::size_t reviewers = 0;
  double mean_weighted = 0.0;
  double acceptable_rate = 0.0;
  std::map<std::string, double> criterion_means;
};

struct AggregateReport {
  std::string caseset;
  std::map<std::string, ModelAggregate> models;
  std::size_t submissions = 0;
  std::size_t reviewers = 0;
};

nlohmann::json to_json(const AggregateReport& r);

/// Pure function of sessions and submissions. Throws ReviewError(not_found)
/// when the case set has no submissions and ReviewError(invalid) for a
/// submission whose slot is unknown.
AggregateReport aggregate_report(const std::string& caseset, const std::vector<ReviewSession>& sessions,
                                 const std::vector<ReviewSubmission>& submissions);

/// Persistent session state: sessions.jsonl snapshot (rewritten atomically)
/// and append-only submissions.jsonl under the data directory.
class ReviewStore {
 public:
  explicit ReviewStore(std::filesystem::path data_dir);

  ReviewSession create_session(const std::string& caseset, const std::string& reviewer, std::uint64_t seed,
                               const std::vector<CaseInput>& cases, const std::vector<corpus::ResponseRecord>& outputs);
  /// Current item, or nullopt once complete.
  std::optional<ReviewItemView> next_item(const std::string& session_id) const;
  SessionStatus status(const std::string& session_id) const;
  /// Returns the number of slots left in the session.
  std::size_t submit_scores(const std::string& session_id, const std::string& item_id, const std::string& slot,
                            const ReviewScores& scores);
  AggregateReport report(const std::string& caseset) const;

  std::vector<ReviewSession> sessions() const;
  std::vector<ReviewSubmission> submissions() const;

 private:
  void persist_sessions() const;
  ReviewSession& find(const std::string& id);
  const ReviewSession& find(const std::string& id) const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, ReviewSession> sessions_;
  std::vector<ReviewSubmission> submissions_;
  std::map<std::string, std::size_t> submission_index_;
};

}  // namespace pipebench::review

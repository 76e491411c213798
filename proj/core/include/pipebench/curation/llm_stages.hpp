// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/gateway/gateway.hpp"
#include "pipebench/gateway/prompts.hpp"

namespace pipebench::curation {

/// Shared knobs for gateway-backed stages.
struct StageCall {
  gateway::Gateway& gw;
  const gateway::PromptLibrary& prompts;
  std::string profile;
  double temperature = 0.0;
  std::size_t max_workers = 4;
};

struct FilterResult {
  std::vector<corpus::QuestionRecord> kept;       // input order
  std::vector<corpus::RemovalRecord> removed;     // reason = judge category
  std::vector<corpus::RemovalRecord> unresolved;  // unparseable or failed calls
};

/// Asks the judge to keep or remove each question. A removal without a
/// category counts as unparseable.
FilterResult llm_question_filter(const std::vector<corpus::QuestionRecord>& questions, const StageCall& call);

enum class EnhanceStatus { continuing, converged, unconverged };

/// One rewrite round. Round 1's parent is the source question; later rounds
/// point at the previous round's record.
struct EnhancementRecord {
  static constexpr std::string_view kind = "enhancement";

  std::string id;  // "<source>/r<round>"
  std::string source_id;
  std::string parent_id;
  std::int64_t round = 1;
  std::string text;
  EnhanceStatus status = EnhanceStatus::continuing;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const EnhancementRecord&) const = default;
};

void to_json(nlohmann::json& j, const EnhancementRecord& r);
void from_json(const nlohmann::json& j, EnhancementRecord& r);
std::vector<corpus::Violation> validate_record(const EnhancementRecord& r);

struct EnhanceResult {
  std::vector<corpus::QuestionRecord> questions;  // final rewrite per source, same id
  std::vector<EnhancementRecord> chain;           // every completed round, grouped by source
  std::vector<corpus::RemovalRecord> unresolved;  // failed mid-chain; completed rounds stay in `chain`
};

/// Rewrites each question until the judge calls it sufficiently complex or
/// max_rounds is hit (last round marked unconverged).
EnhanceResult complexity_enhance(const std::vector<corpus::QuestionRecord>& questions, const StageCall& rewriter,
                                 const std::string& judge_profile, int max_rounds);

struct DistillationCandidate {
  std::string teacher;  // profile name
  int index = 0;        // sample index within the teacher
  std::string reasoning_text;
  std::string answer_text;
  std::optional<double> judge_score;  // empty when judging failed
};

struct DistillResult {
  std::optional<std::size_t> winner;  // index into candidates
  std::vector<DistillationCandidate> candidates;
  std::vector<std::string> failures;
};

/// k samples from every teacher, each scored by the evaluator; the highest
/// score wins, ties going to the earlier (teacher, index).
DistillResult distill_best_answer(const corpus::QuestionRecord& question, const std::vector<std::string>& teachers,
                                  int k, const StageCall& evaluator, double teacher_temperature);

struct DistillBatchResult {
  std::vector<corpus::ResponseRecord> responses;  // one per distilled question, input order
  std::vector<corpus::RemovalRecord> undistilled;
};

DistillBatchResult distill_questions(const std::vector<corpus::QuestionRecord>& questions,
                                     const std::vector<std::string>& teachers, int k, const StageCall& evaluator,
                                     double teacher_temperature);

}  // namespace pipebench::curation

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/gateway/gateway.hpp"
#include "pipebench/gateway/prompts.hpp"

namespace pipebench::curation {

using corpus::QuestionRecord;
using corpus::RemovalRecord;

enum class DedupAction { retain_both, discard_one, adjudicate_llm };
enum class Adjudication { duplicate, distinct };

inline constexpr corpus::EnumNames<DedupAction, 3> kDedupActionNames{{{
    {DedupAction::retain_both, "retain_both"},
    {DedupAction::discard_one, "discard_one"},
    {DedupAction::adjudicate_llm, "adjudicate_llm"},
}}};

/// One pair decision. For adjudicated pairs `outcome` holds the verdict, or
/// is empty when the adjudicator failed.
struct DedupDecision {
  static constexpr std::string_view kind = "dedup_decision";

  std::string id;  // "<later id>~<earlier id>"
  std::string earlier_id;
  std::string later_id;
  double similarity = 0.0;
  DedupAction action = DedupAction::retain_both;
  std::optional<Adjudication> outcome;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const DedupDecision&) const = default;
};

void to_json(nlohmann::json& j, const DedupDecision& d);
void from_json(const nlohmann::json& j, DedupDecision& d);
std::vector<corpus::Violation> validate_record(const DedupDecision& d);

/// Decides whether two questions in the ambiguous band are duplicates.
/// Throwing marks the later record unresolved.
using Adjudicator = std::function<Adjudication(const QuestionRecord& earlier, const QuestionRecord& later, double similarity)>;

struct BandThresholds {
  double low = 0.7;
  double high = 0.9;
};

struct BandDedupResult {
  std::vector<QuestionRecord> retained;  // ascending id, fingerprints filled in
  std::vector<RemovalRecord> discarded;
  std::vector<RemovalRecord> unresolved;
  std::vector<DedupDecision> log;
};

/// Scans records in ascending id order and compares each against every
/// earlier retained record: similarity < low keeps both, > high discards the
/// later record, and the closed band [low, high] goes to the adjudicator.
BandDedupResult simhash_dedup_band(std::vector<QuestionRecord> questions, BandThresholds thresholds,
                                   const Adjudicator& adjudicator);

/// Adjudicator backed by a model call (`dedup_adjudicate` prompt).
Adjudicator llm_adjudicator(gateway::Gateway& gw, const gateway::PromptLibrary& prompts, std::string profile,
                            double temperature);

struct DuplicateCluster {
  std::string retained_id;
  std::vector<std::string> member_ids;  // ascending, includes retained_id
  double max_similarity = 0.0;
};

struct EmbeddingDedupResult {
  std::vector<QuestionRecord> retained;  // ascending id
  std::vector<RemovalRecord> discarded;
  std::vector<DuplicateCluster> clusters;  // only clusters with >= 2 members
};

/// Connected components over pairs with cosine > threshold; the smallest id
/// of each component survives. Embedding failures propagate.
EmbeddingDedupResult embedding_dedup(std::vector<QuestionRecord> questions, double threshold, gateway::Gateway& gw,
                                     std::string_view profile, std::size_t batch_size = 64);

}  // namespace pipebench::curation

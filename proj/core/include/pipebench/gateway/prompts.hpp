// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pipebench/gateway/types.hpp"

namespace pipebench::gateway {

/// Task tags for every model call the pipeline makes. Templates are looked
/// up by these names and the mock backend dispatches on them.
namespace tasks {
inline constexpr std::string_view kQuestionFilter = "question_filter";
inline constexpr std::string_view kDedupAdjudicate = "dedup_adjudicate";
inline constexpr std::string_view kComplexityRewrite = "complexity_rewrite";
inline constexpr std::string_view kComplexityJudge = "complexity_judge";
inline constexpr std::string_view kDistillAnswer = "distill_answer";
inline constexpr std::string_view kDistillJudge = "distill_judge";
inline constexpr std::string_view kSampleResponse = "sample_response";
inline constexpr std::string_view kRankCandidates = "rank_candidates";
inline constexpr std::string_view kJudgePair = "judge_pair";
inline constexpr std::string_view kScoreResponse = "score_response";
inline constexpr std::string_view kDomainLabel = "domain_label";
inline constexpr std::string_view kSemanticRelevance = "semantic_relevance";
inline constexpr std::string_view kParaphrase = "paraphrase";
inline constexpr std::string_view kCoverageAnalysis = "coverage_analysis";
inline constexpr std::string_view kTopicExtraction = "topic_extraction";
inline constexpr std::string_view kQueryGeneration = "query_generation";
inline constexpr std::string_view kAnswerGeneration = "answer_generation";
inline constexpr std::string_view kReferenceStandardize = "reference_standardize";
inline constexpr std::string_view kReferenceRefine = "reference_refine";
inline constexpr std::string_view kExtractStatements = "extract_statements";
inline constexpr std::string_view kJudgeSupport = "judge_support";

std::vector<std::string_view> all();
}  // namespace tasks

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replaces `{{name}}` placeholders. An unknown placeholder is an error.
std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& vars);

class PromptLibrary {
 public:
  struct Template {
    std::string system;
    std::string user;
  };

  static PromptLibrary load(const std::filesystem::path& path);
  static PromptLibrary from_json(const nlohmann::json& j);

  bool has(std::string_view task) const;
  /// Tasks from tasks::all() that have no template.
  std::vector<std::string> missing_tasks() const;

  GenerationRequest render(std::string_view task, std::map<std::string, std::string> vars, double temperature,
                           std::optional<std::int64_t> seed = std::nullopt) const;

 private:
  std::map<std::string, Template, std::less<>> templates_;
};

}  // namespace pipebench::gateway

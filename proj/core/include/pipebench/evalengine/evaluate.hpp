// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/evalengine/metrics.hpp"
#include "pipebench/evalengine/statements.hpp"

namespace pipebench::evalengine {

/// A benchmark question with its prepared (standardized, refined) ground truth.
struct EvalCase {
  static constexpr std::string_view kind = "eval_case";

  std::string id;
  std::string question;
  std::string ground_truth;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const EvalCase&) const = default;
};

void to_json(nlohmann::json& j, const EvalCase& r);
void from_json(const nlohmann::json& j, EvalCase& r);
std::vector<corpus::Violation> validate_record(const EvalCase& r);

struct TracedVerdict {
  Statement statement;
  std::optional<EntailmentVerdict> verdict;  // empty: unresolved
  std::string error;
};

struct EvalResult {
  std::string case_id;
  std::string model_id;
  bool complete = false;  // false when any verdict is unresolved or a stage failed
  std::optional<PrecisionRecall> pr;
  std::optional<double> final_score;
  std::vector<TracedVerdict> precision_trace;  // response statements vs ground truth
  std::vector<TracedVerdict> recall_trace;     // ground-truth statements vs response
  std::string error;
};

nlohmann::json to_json(const EvalResult& r);

EvalResult evaluate_case(const EvalCase& c, const corpus::ResponseRecord& response, const StageCall& extractor,
                         const StageCall& judge, StatementCache& cache, const EvalWeights& weights = {});

struct ModelSummary {
  std::size_t cases = 0;
  std::size_t complete = 0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double weighted = 0.0;  // final_score(mean_precision, mean_recall)
};

struct EvalReport {
  std::vector<EvalResult> results;  // by (model, case)
  std::map<std::string, ModelSummary> models;
  std::map<std::string, int> ranking;  // empty with fewer than 2 scored models
  EvalWeights weights;

  std::size_t incomplete() const;
};

nlohmann::json to_json(const EvalReport& r);

/// Evaluates every response whose question_id names a case. Responses for
/// unknown cases throw std::invalid_argument.
EvalReport evaluate_all(const std::vector<EvalCase>& cases, const std::vector<corpus::ResponseRecord>& outputs,
                        const StageCall& extractor, const StageCall& judge, StatementCache& cache,
                        const EvalWeights& weights = {});

}  // namespace pipebench::evalengine

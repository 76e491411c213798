// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pipebench/corpus/records.hpp"

namespace pipebench::evalengine {

/// Six-criterion expert scores: 0..3 each, safety only 0 (unsafe) or 3.
struct ReviewScores {
  int grammatical_fluency = 0;
  int logical_reasoning = 0;
  int accuracy = 0;
  int comprehensiveness = 0;
  int practicality = 0;
  int safety = 0;

  std::vector<corpus::Violation> validate() const;
  bool operator==(const ReviewScores&) const = default;
};

void to_json(nlohmann::json& j, const ReviewScores& s);
void from_json(const nlohmann::json& j, ReviewScores& s);

struct CriterionWeight {
  std::string_view name;
  int percent;
};

/// fluency 10, safety 10, logic 10, accuracy 20, comprehensiveness 20,
/// practicality 30.
inline constexpr std::array<CriterionWeight, 6> kCriterionWeights{{
    {"grammatical_fluency", 10},
    {"safety", 10},
    {"logical_reasoning", 10},
    {"accuracy", 20},
    {"comprehensiveness", 20},
    {"practicality", 30},
}};

int criterion_value(const ReviewScores& s, std::string_view name);

/// Weighted sum in [0, 3]. Throws std::invalid_argument on out-of-range scores.
double weighted_human_score(const ReviewScores& s);

/// accuracy, comprehensiveness and practicality all >= 2.
bool acceptable(const ReviewScores& s);
double acceptable_rate(std::span<const ReviewScores> reviews);

struct EvalWeights {
  double alpha = 0.3;  // precision
  double beta = 0.7;   // recall

  std::vector<corpus::Violation> validate() const;
};

struct PrecisionRecall {
  std::size_t n_resp = 0;
  std::size_t n_correct_in_resp = 0;
  std::size_t n_gt = 0;
  std::size_t n_recalled_from_gt = 0;
  double precision = 0.0;
  double recall = 0.0;

  bool operator==(const PrecisionRecall&) const = default;
};

/// supported / total. Throws std::invalid_argument when total is zero.
double answer_precision(std::size_t supported, std::size_t total);
double answer_recall(std::size_t recalled, std::size_t total);
PrecisionRecall precision_recall(std::size_t n_correct_in_resp, std::size_t n_resp, std::size_t n_recalled_from_gt,
                                 std::size_t n_gt);

/// alpha * P + beta * R.
double final_score(double precision, double recall, const EvalWeights& w = {});

/// Competition ranking by descending score (1 = best; ties share the
/// smaller rank). Throws on fewer than 2 models or non-finite scores.
std::map<std::string, int> rank_models(const std::map<std::string, double>& scores);

}  // namespace pipebench::evalengine

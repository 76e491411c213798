// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/evalengine/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "pipebench/corpus/dataset.hpp"

namespace pipebench::evalengine {

using nlohmann::json;

std::vector<corpus::Violation> ReviewScores::validate() const {
  std::vector<corpus::Violation> v;
  for (const auto& c : kCriterionWeights) {
    const int x = criterion_value(*this, c.name);
    if (c.name == "safety") {
      if (x != 0 && x != 3) v.push_back({std::string(c.name), "must be 0 (unsafe) or 3 (safe)"});
    } else if (x < 0 || x > 3) {
      v.push_back({std::string(c.name), "must be an integer in 0..3"});
    }
  }
  return v;
}

void to_json(json& j, const ReviewScores& s) {
  j = json::object();
  for (const auto& c : kCriterionWeights) j[std::string(c.name)] = criterion_value(s, c.name);
}

void from_json(const json& j, ReviewScores& s) {
  corpus::FieldReader f(j);
  s.grammatical_fluency = static_cast<int>(f.integer("grammatical_fluency"));
  s.logical_reasoning = static_cast<int>(f.integer("logical_reasoning"));
  s.accuracy = static_cast<int>(f.integer("accuracy"));
  s.comprehensiveness = static_cast<int>(f.integer("comprehensiveness"));
  s.practicality = static_cast<int>(f.integer("practicality"));
  s.safety = static_cast<int>(f.integer("safety"));
}

int criterion_value(const ReviewScores& s, std::string_view name) {
  if (name == "grammatical_fluency") return s.grammatical_fluency;
  if (name == "logical_reasoning") return s.logical_reasoning;
  if (name == "accuracy") return s.accuracy;
  if (name == "comprehensiveness") return s.comprehensiveness;
  if (name == "practicality") return s.practicality;
  if (name == "safety") return s.safety;
  throw std::invalid_argument("unknown criterion '" + std::string(name) + "'");
}

double weighted_human_score(const ReviewScores& s) {
  if (auto v = s.validate(); !v.empty()) throw std::invalid_argument("review scores: " + corpus::detail::describe(v));
  // Integer percent weights keep all-3s at exactly 3.0.
  int total = 0;
  for (const auto& c : kCriterionWeights) total += c.percent * criterion_value(s, c.name);
  return static_cast<double>(total) / 100.0;
}

bool acceptable(const ReviewScores& s) { return s.accuracy >= 2 && s.comprehensiveness >= 2 && s.practicality >= 2; }

double acceptable_rate(std::span<const ReviewScores> reviews) {
  if (reviews.empty()) throw std::invalid_argument("acceptable_rate: no reviews");
  std::size_t ok = 0;
  for (const auto& r : reviews) {
    if (auto v = r.validate(); !v.empty()) throw std::invalid_argument("review scores: " + corpus::detail::describe(v));
    ok += acceptable(r) ? 1 : 0;
  }
  return static_cast<double>(ok) / static_cast<double>(reviews.size());
}

std::vector<corpus::Violation> EvalWeights::validate() const {
  std::vector<corpus::Violation> v;
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) v.push_back({"alpha", "must be finite and >= 0"});
  if (!(beta >= 0.0) || !std::isfinite(beta)) v.push_back({"beta", "must be finite and >= 0"});
  if (std::abs(alpha + beta - 1.0) > 1e-9) v.push_back({"alpha", "alpha + beta must equal 1"});
  return v;
}

double answer_precision(std::size_t supported, std::size_t total) {
  if (total == 0) throw std::invalid_argument("answer_precision: zero response statements");
  if (supported > total) throw std::invalid_argument("answer_precision: supported exceeds total");
  return static_cast<double>(supported) / static_cast<double>(total);
}

double answer_recall(std::size_t recalled, std::size_t total) {
  if (total == 0) throw std::invalid_argument("answer_recall: zero ground-truth statements");
  if (recalled > total) throw std::invalid_argument("answer_recall: recalled exceeds total");
  return static_cast<double>(recalled) / static_cast<double>(total);
}

PrecisionRecall precision_recall(std::size_t n_correct_in_resp, std::size_t n_resp, std::size_t n_recalled_from_gt,
                                 std::size_t n_gt) {
  PrecisionRecall pr{n_resp, n_correct_in_resp, n_gt, n_recalled_from_gt, 0.0, 0.0};
  pr.precision = answer_precision(n_correct_in_resp, n_resp);
  pr.recall = answer_recall(n_recalled_from_gt, n_gt);
  return pr;
}

double final_score(double precision, double recall, const EvalWeights& w) {
  if (auto v = w.validate(); !v.empty()) throw std::invalid_argument("eval weights: " + corpus::detail::describe(v));
  if (!(precision >= 0.0 && precision <= 1.0) || !(recall >= 0.0 && recall <= 1.0)) {
    throw std::invalid_argument("final_score: precision and recall must be in [0, 1]");
  }
  return w.alpha * precision + w.beta * recall;
}

std::map<std::string, int> rank_models(const std::map<std::string, double>& scores) {
  if (scores.size() < 2) throw std::invalid_argument("rank_models: need at least 2 models");
  for (const auto& [m, s] : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("rank_models: non-finite score for " + m);
  }
  std::map<std::string, int> out;
  for (const auto& [m, s] : scores) {
    int better = 0;
    for (const auto& [other, t] : scores) better += t > s ? 1 : 0;
    out[m] = better + 1;
  }
  return out;
}

}  // namespace pipebench::evalengine

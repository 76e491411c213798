// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"

namespace pipebench::curation {

/// Outcome of one mechanically checked instruction constraint.
struct ConstraintResult {
  std::string description;
  int pass = 0;  // 0 or 1
};

/// Mean of the pass bits. Throws std::invalid_argument on an empty list or a
/// bit outside {0, 1}; a mean over nothing is undefined, not zero.
double verify_score_if(std::span<const ConstraintResult> results);

struct QualitySignals {
  double ppl = 1.0;
  double ppl_min = 1.0;
  double ppl_max = 2.0;
  double difficulty_score = 1.0;  // 1..5
  double alpha = 0.5;
  double beta = 0.5;

  std::vector<corpus::Violation> validate() const;
};

/// alpha * (1 - normalized ppl) + beta * (difficulty - 1) / 4.
/// Throws std::invalid_argument when the signals are invalid.
double cqd_score(const QualitySignals& s);

/// >= 0.8 advanced, [0.5, 0.8) intermediate, otherwise simple.
corpus::ComplexityBand cqd_band(double score);

/// Per-question inputs to screening, ingested from a signals file since
/// perplexity needs model inference.
struct SignalsRecord {
  static constexpr std::string_view kind = "signals";

  std::string id;  // question id
  double ppl = 0.0;
  double difficulty_score = 0.0;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const SignalsRecord&) const = default;
};

void to_json(nlohmann::json& j, const SignalsRecord& r);
void from_json(const nlohmann::json& j, SignalsRecord& r);
std::vector<corpus::Violation> validate_record(const SignalsRecord& r);

struct ScreenResult {
  std::vector<corpus::QuestionRecord> screened;  // input order, band set, "cqd" in extra
  std::vector<corpus::RemovalRecord> removed;    // questions without signals
  std::map<std::string, std::size_t> band_counts;
  double ppl_min = 0.0;
  double ppl_max = 0.0;
};

/// Bands every question that has signals. PPL bounds are taken over the
/// matched signals. Throws std::invalid_argument when fewer than two distinct
/// PPL values are present (the normalization is undefined).
ScreenResult screen_questions(std::vector<corpus::QuestionRecord> questions, std::span<const SignalsRecord> signals,
                              double alpha, double beta);

}  // namespace pipebench::curation

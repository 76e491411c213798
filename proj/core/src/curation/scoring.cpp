// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/curation/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pipebench/corpus/dataset.hpp"

namespace pipebench::curation {

using nlohmann::json;

double verify_score_if(std::span<const ConstraintResult> results) {
  if (results.empty()) throw std::invalid_argument("verify_score_if: no constraint results");
  std::size_t passed = 0;
  for (const auto& r : results) {
    if (r.pass != 0 && r.pass != 1) throw std::invalid_argument("verify_score_if: pass must be 0 or 1");
    passed += static_cast<std::size_t>(r.pass);
  }
  return static_cast<double>(passed) / static_cast<double>(results.size());
}

std::vector<corpus::Violation> QualitySignals::validate() const {
  std::vector<corpus::Violation> v;
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(ppl) || ppl <= 0.0) v.push_back({"ppl", "must be finite and > 0"});
  if (!finite(ppl_min) || !finite(ppl_max) || !(ppl_min < ppl_max)) {
    v.push_back({"ppl_min", "must be finite and < ppl_max"});
  } else if (finite(ppl) && (ppl < ppl_min || ppl > ppl_max)) {
    v.push_back({"ppl", "must lie within [ppl_min, ppl_max]"});
  }
  if (!finite(difficulty_score) || difficulty_score < 1.0 || difficulty_score > 5.0) {
    v.push_back({"difficulty_score", "must be in [1, 5]"});
  }
  if (!finite(alpha) || alpha < 0.0) v.push_back({"alpha", "must be finite and >= 0"});
  if (!finite(beta) || beta < 0.0) v.push_back({"beta", "must be finite and >= 0"});
  return v;
}

double cqd_score(const QualitySignals& s) {
  if (auto v = s.validate(); !v.empty()) throw std::invalid_argument("cqd_score: " + corpus::detail::describe(v));
  const double ppl_term = 1.0 - (s.ppl - s.ppl_min) / (s.ppl_max - s.ppl_min);
  const double diff_term = (s.difficulty_score - 1.0) / 4.0;
  return s.alpha * ppl_term + s.beta * diff_term;
}

corpus::ComplexityBand cqd_band(double score) {
  if (score >= 0.8) return corpus::ComplexityBand::advanced;
  if (score >= 0.5) return corpus::ComplexityBand::intermediate;
  return corpus::ComplexityBand::simple;
}

void to_json(json& j, const SignalsRecord& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["ppl"] = r.ppl;
  j["difficulty_score"] = r.difficulty_score;
}

void from_json(const json& j, SignalsRecord& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.ppl = f.real("ppl");
  r.difficulty_score = f.real("difficulty_score");
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const SignalsRecord& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  if (!std::isfinite(r.ppl) || r.ppl <= 0.0) v.push_back({"ppl", "must be finite and > 0"});
  if (!(r.difficulty_score >= 1.0 && r.difficulty_score <= 5.0)) v.push_back({"difficulty_score", "must be in [1, 5]"});
  return v;
}

ScreenResult screen_questions(std::vector<corpus::QuestionRecord> questions, std::span<const SignalsRecord> signals,
                              double alpha, double beta) {
  std::map<std::string, const SignalsRecord*, std::less<>> by_id;
  for (const auto& s : signals) {
    if (auto v = validate_record(s); !v.empty()) {
      throw std::invalid_argument("signals '" + s.id + "': " + corpus::detail::describe(v));
    }
    if (!by_id.emplace(s.id, &s).second) throw std::invalid_argument("duplicate signals for '" + s.id + "'");
  }

  ScreenResult out;
  bool first = true;
  for (const auto& q : questions) {
    auto it = by_id.find(q.id);
    if (it == by_id.end()) continue;
    const double p = it->second->ppl;
    out.ppl_min = first ? p : std::min(out.ppl_min, p);
    out.ppl_max = first ? p : std::max(out.ppl_max, p);
    first = false;
  }
  const bool any_matched = !first;
  if (any_matched && !(out.ppl_min < out.ppl_max)) {
    throw std::invalid_argument("screen_questions: PPL_max equals PPL_min; normalization undefined");
  }

  for (auto& q : questions) {
    auto it = by_id.find(q.id);
    if (it == by_id.end()) {
      out.removed.push_back({q.id, "screen", "missing_signals", "no signals record for question", json::object()});
      continue;
    }
    QualitySignals s{it->second->ppl, out.ppl_min, out.ppl_max, it->second->difficulty_score, alpha, beta};
    const double score = cqd_score(s);
    q.complexity_band = cqd_band(score);
    q.extra["cqd"] = score;
    ++out.band_counts[std::string(corpus::kComplexityBandNames.name(*q.complexity_band))];
    out.screened.push_back(std::move(q));
  }
  return out;
}

}  // namespace pipebench::curation

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/evalengine/evaluate.hpp"

#include <algorithm>
#include <stdexcept>

#include "pipebench/common/parallel.hpp"

namespace pipebench::evalengine {

using nlohmann::json;

void to_json(json& j, const EvalCase& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["question"] = r.question;
  j["ground_truth"] = r.ground_truth;
}

void from_json(const json& j, EvalCase& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.question = f.text("question");
  r.ground_truth = f.text("ground_truth");
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const EvalCase& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  corpus::require_text(v, "question", r.question);
  corpus::require_text(v, "ground_truth", r.ground_truth);
  return v;
}

namespace {

json trace_json(const std::vector<TracedVerdict>& t) {
  json a = json::array();
  for (const auto& v : t) {
    json e{{"statement_id", v.statement.id}, {"statement", v.statement.text}};
    if (v.verdict) {
      e["supported"] = v.verdict->supported;
      e["judge_model"] = v.verdict->judge_model;
      e["raw_hash"] = v.verdict->raw_hash;
    } else {
      e["unresolved"] = v.error;
    }
    a.push_back(std::move(e));
  }
  return a;
}

std::vector<TracedVerdict> judge_all(const std::vector<Statement>& statements, const std::string& context,
                                     const StageCall& judge) {
  auto outcomes = bounded_map(statements.size(), judge.max_workers,
                              [&](std::size_t i) { return judge_support(statements[i], context, judge); });
  std::vector<TracedVerdict> out;
  for (std::size_t i = 0; i < statements.size(); ++i) {
    TracedVerdict t{statements[i], std::nullopt, ""};
    if (outcomes[i].ok()) {
      t.verdict = outcomes[i].value->verdict;
      t.error = outcomes[i].value->error;
    } else {
      try {
        std::rethrow_exception(outcomes[i].error);
      } catch (const std::exception& e) {
        t.error = e.what();
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

json to_json(const EvalResult& r) {
  json j{{"case_id", r.case_id}, {"model_id", r.model_id}, {"complete", r.complete}};
  if (r.pr) {
    j["n_resp"] = r.pr->n_resp;
    j["n_correct_in_resp"] = r.pr->n_correct_in_resp;
    j["n_gt"] = r.pr->n_gt;
    j["n_recalled_from_gt"] = r.pr->n_recalled_from_gt;
    j["precision"] = r.pr->precision;
    j["recall"] = r.pr->recall;
  }
  if (r.final_score) j["final_score"] = *r.final_score;
  if (!r.error.empty()) j["error"] = r.error;
  j["precision_trace"] = trace_json(r.precision_trace);
  j["recall_trace"] = trace_json(r.recall_trace);
  return j;
}

EvalResult evaluate_case(const EvalCase& c, const corpus::ResponseRecord& response, const StageCall& extractor,
                         const StageCall& judge, StatementCache& cache, const EvalWeights& weights) {
  EvalResult r;
  r.case_id = c.id;
  r.model_id = response.model_id;
  try {
    auto resp = extract_statements(response.answer_text, StatementSource::response, response.id, extractor, cache);
    auto gt = extract_statements(c.ground_truth, StatementSource::ground_truth, c.id, extractor, cache);
    r.precision_trace = judge_all(resp, c.ground_truth, judge);
    r.recall_trace = judge_all(gt, response.answer_text, judge);
  } catch (const std::exception& e) {
    r.error = e.what();
    return r;
  }
  std::size_t supported = 0, recalled = 0, unresolved = 0;
  for (const auto& t : r.precision_trace) {
    if (!t.verdict) ++unresolved;
    else supported += t.verdict->supported ? 1 : 0;
  }
  for (const auto& t : r.recall_trace) {
    if (!t.verdict) ++unresolved;
    else recalled += t.verdict->supported ? 1 : 0;
  }
  if (unresolved > 0) {
    r.error = std::to_string(unresolved) + " unresolved verdict(s)";
    return r;
  }
  r.pr = precision_recall(supported, r.precision_trace.size(), recalled, r.recall_trace.size());
  r.final_score = final_score(r.pr->precision, r.pr->recall, weights);
  r.complete = true;
  return r;
}

std::size_t EvalReport::incomplete() const {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.complete; }));
}

json to_json(const EvalReport& r) {
  json j;
  j["weights"] = {{"alpha", r.weights.alpha}, {"beta", r.weights.beta}};
  j["results"] = json::array();
  for (const auto& x : r.results) j["results"].push_back(to_json(x));
  j["models"] = json::object();
  for (const auto& [m, s] : r.models) {
    j["models"][m] = {{"cases", s.cases},
                      {"complete", s.complete},
                      {"mean_precision", s.mean_precision},
                      {"mean_recall", s.mean_recall},
                      {"weighted", s.weighted}};
  }
  j["ranking"] = r.ranking;
  j["incomplete"] = r.incomplete();
  return j;
}

EvalReport evaluate_all(const std::vector<EvalCase>& cases, const std::vector<corpus::ResponseRecord>& outputs,
                        const StageCall& extractor, const StageCall& judge, StatementCache& cache,
                        const EvalWeights& weights) {
  std::map<std::string, const EvalCase*> by_id;
  for (const auto& c : cases) by_id[c.id] = &c;
  std::vector<const corpus::ResponseRecord*> ordered;
  for (const auto& o : outputs) {
    if (!by_id.contains(o.question_id)) throw std::invalid_argument("output " + o.id + " names unknown case " + o.question_id);
    ordered.push_back(&o);
  }
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) {
    return a->model_id != b->model_id ? a->model_id < b->model_id : a->question_id < b->question_id;
  });

  EvalReport rep;
  rep.weights = weights;
  for (auto* o : ordered) rep.results.push_back(evaluate_case(*by_id[o->question_id], *o, extractor, judge, cache, weights));

  std::map<std::string, std::pair<double, double>> sums;
  for (const auto& r : rep.results) {
    auto& s = rep.models[r.model_id];
    ++s.cases;
    if (!r.complete) continue;
    ++s.complete;
    sums[r.model_id].first += r.pr->precision;
    sums[r.model_id].second += r.pr->recall;
  }
  std::map<std::string, double> scored;
  for (auto& [m, s] : rep.models) {
    if (s.complete == 0) continue;
    s.mean_precision = sums[m].first / static_cast<double>(s.complete);
    s.mean_recall = sums[m].second / static_cast<double>(s.complete);
    s.weighted = final_score(s.mean_precision, s.mean_recall, weights);
    scored[m] = s.weighted;
  }
  if (scored.size() >= 2) rep.ranking = rank_models(scored);
  return rep;
}

}  // namespace pipebench::evalengine

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/curation/llm_stages.hpp"

#include <stdexcept>

#include "pipebench/common/parallel.hpp"
#include "pipebench/common/text.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::curation {

using nlohmann::json;
namespace reply = gateway::reply;
namespace tasks = gateway::tasks;

namespace {

constexpr corpus::EnumNames<EnhanceStatus, 3> kEnhanceStatusNames{{{
    {EnhanceStatus::continuing, "continuing"},
    {EnhanceStatus::converged, "converged"},
    {EnhanceStatus::unconverged, "unconverged"},
}}};

std::string message_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

struct FilterVerdict {
  bool keep = false;
  std::string reason;
};

}  // namespace

FilterResult llm_question_filter(const std::vector<corpus::QuestionRecord>& questions, const StageCall& call) {
  auto outcomes = bounded_map(questions.size(), call.max_workers, [&](std::size_t i) {
    auto req = call.prompts.render(tasks::kQuestionFilter, {{"question", questions[i].text}}, call.temperature);
    auto text = call.gw.generate(req, call.profile).text;
    auto verdict = reply::field(text, "VERDICT");
    if (!verdict) throw std::runtime_error("no VERDICT in judge output");
    std::string v = reply::lower(*verdict);
    if (v == "keep") return FilterVerdict{true, ""};
    if (v != "remove") throw std::runtime_error("unknown verdict '" + v + "'");
    auto reason = reply::field(text, "REASON");
    if (!reason || text::is_blank(*reason)) throw std::runtime_error("removal without a REASON category");
    return FilterVerdict{false, reply::lower(text::trim(*reason))};
  });

  FilterResult out;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    if (!outcomes[i].ok()) {
      out.unresolved.push_back({q.id, "question_filter", "unparseable_judge", message_of(outcomes[i].error), json::object()});
    } else if (outcomes[i].value->keep) {
      out.kept.push_back(q);
    } else {
      out.removed.push_back({q.id, "question_filter", outcomes[i].value->reason, "judge verdict", json::object()});
    }
  }
  return out;
}

void to_json(json& j, const EnhancementRecord& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["source_id"] = r.source_id;
  j["parent_id"] = r.parent_id;
  j["round"] = r.round;
  j["text"] = r.text;
  j["status"] = kEnhanceStatusNames.name(r.status);
}

void from_json(const json& j, EnhancementRecord& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.source_id = f.text("source_id");
  r.parent_id = f.text("parent_id");
  r.round = f.integer("round");
  r.text = f.text("text");
  r.status = f.enumerated("status", kEnhanceStatusNames);
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const EnhancementRecord& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  corpus::require_text(v, "source_id", r.source_id);
  corpus::require_text(v, "parent_id", r.parent_id);
  corpus::require_text(v, "text", r.text);
  if (r.round < 1) v.push_back({"round", "must be >= 1"});
  return v;
}

namespace {

struct Chain {
  std::vector<EnhancementRecord> rounds;
  std::optional<std::string> failure;
};

Chain enhance_one(const corpus::QuestionRecord& q, const StageCall& call, const std::string& judge_profile,
                  int max_rounds) {
  Chain c;
  std::string current = q.text;
  std::string parent = q.id;
  for (int round = 1; round <= max_rounds; ++round) {
    EnhancementRecord r;
    try {
      auto req = call.prompts.render(tasks::kComplexityRewrite, {{"question", current}, {"round", std::to_string(round)}},
                                     call.temperature, round);
      auto text = call.gw.generate(req, call.profile).text;
      auto rewritten = reply::tail(text, "QUESTION");
      if (!rewritten || text::is_blank(*rewritten)) throw std::runtime_error("no QUESTION in rewrite output");
      r.text = text::trim(*rewritten);

      auto jreq = call.prompts.render(tasks::kComplexityJudge, {{"question", r.text}}, 0.0);
      auto verdict = reply::field(call.gw.generate(jreq, judge_profile).text, "VERDICT");
      std::string v = verdict ? reply::lower(*verdict) : "";
      if (v == "sufficient") r.status = EnhanceStatus::converged;
      else if (v == "insufficient") r.status = round == max_rounds ? EnhanceStatus::unconverged : EnhanceStatus::continuing;
      else throw std::runtime_error("no sufficient/insufficient VERDICT in complexity judge output");
    } catch (const std::exception& e) {
      c.failure = "round " + std::to_string(round) + ": " + e.what();
      return c;
    }
    r.id = q.id + "/r" + std::to_string(round);
    r.source_id = q.id;
    r.parent_id = parent;
    r.round = round;
    parent = r.id;
    current = r.text;
    const bool done = r.status != EnhanceStatus::continuing;
    c.rounds.push_back(std::move(r));
    if (done) break;
  }
  return c;
}

}  // namespace

EnhanceResult complexity_enhance(const std::vector<corpus::QuestionRecord>& questions, const StageCall& rewriter,
                                 const std::string& judge_profile, int max_rounds) {
  if (max_rounds < 1) throw std::invalid_argument("complexity_enhance: max_rounds must be >= 1");
  auto chains = bounded_map(questions.size(), rewriter.max_workers,
                            [&](std::size_t i) { return enhance_one(questions[i], rewriter, judge_profile, max_rounds); });
  EnhanceResult out;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    Chain& c = *chains[i].value;  // enhance_one never throws
    for (auto& r : c.rounds) out.chain.push_back(r);
    if (c.failure) {
      out.unresolved.push_back({questions[i].id, "complexity_enhance", "rewrite_failed", *c.failure, json::object()});
      continue;
    }
    corpus::QuestionRecord q = questions[i];
    q.text = c.rounds.back().text;
    q.extra["enhanced_from"] = c.rounds.back().id;
    out.questions.push_back(std::move(q));
  }
  return out;
}

DistillResult distill_best_answer(const corpus::QuestionRecord& question, const std::vector<std::string>& teachers,
                                  int k, const StageCall& evaluator, double teacher_temperature) {
  if (teachers.empty()) throw std::invalid_argument("distill_best_answer: need at least one teacher");
  if (k < 1) throw std::invalid_argument("distill_best_answer: k must be >= 1");

  const std::size_t total = teachers.size() * static_cast<std::size_t>(k);
  auto outcomes = bounded_map(total, evaluator.max_workers, [&](std::size_t slot) {
    DistillationCandidate c;
    c.teacher = teachers[slot / static_cast<std::size_t>(k)];
    c.index = static_cast<int>(slot % static_cast<std::size_t>(k));
    auto req = evaluator.prompts.render(tasks::kDistillAnswer,
                                        {{"question", question.text}, {"sample", std::to_string(c.index)}},
                                        teacher_temperature, c.index);
    auto text = evaluator.gw.generate(req, c.teacher).text;
    auto answer = reply::tail(text, "ANSWER");
    c.answer_text = text::trim(answer ? *answer : text);
    if (c.answer_text.empty()) throw std::runtime_error("empty answer");
    if (auto reasoning = reply::field(text, "REASONING")) c.reasoning_text = text::trim(*reasoning);

    auto jreq = evaluator.prompts.render(tasks::kDistillJudge, {{"question", question.text}, {"answer", c.answer_text}},
                                         evaluator.temperature);
    try {
      auto score = reply::field(evaluator.gw.generate(jreq, evaluator.profile).text, "SCORE");
      if (score) c.judge_score = reply::number(*score);
    } catch (const std::exception&) {
      // candidate stays unscored
    }
    return c;
  });

  DistillResult out;
  for (std::size_t i = 0; i < total; ++i) {
    if (!outcomes[i].ok()) {
      out.failures.push_back(teachers[i / static_cast<std::size_t>(k)] + "#" + std::to_string(i % k) + ": " +
                             message_of(outcomes[i].error));
      continue;
    }
    auto& c = *outcomes[i].value;
    if (!c.judge_score) out.failures.push_back(c.teacher + "#" + std::to_string(c.index) + ": unscored");
    out.candidates.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < out.candidates.size(); ++i) {
    const auto& s = out.candidates[i].judge_score;
    if (!s) continue;
    if (!out.winner || *s > *out.candidates[*out.winner].judge_score) out.winner = i;
  }
  return out;
}

DistillBatchResult distill_questions(const std::vector<corpus::QuestionRecord>& questions,
                                     const std::vector<std::string>& teachers, int k, const StageCall& evaluator,
                                     double teacher_temperature) {
  DistillBatchResult out;
  for (const auto& q : questions) {
    auto r = distill_best_answer(q, teachers, k, evaluator, teacher_temperature);
    if (!r.winner) {
      std::string detail = "no scored candidate";
      if (!r.failures.empty()) detail += "; " + r.failures.front();
      out.undistilled.push_back({q.id, "distill", "undistilled", detail, json::object()});
      continue;
    }
    const auto& w = r.candidates[*r.winner];
    corpus::ResponseRecord resp;
    resp.id = q.id + "/distilled";
    resp.question_id = q.id;
    resp.model_id = w.teacher;
    if (!w.reasoning_text.empty()) resp.reasoning_text = w.reasoning_text;
    resp.answer_text = w.answer_text;
    resp.sampling_temperature = teacher_temperature;
    resp.extra["judge_score"] = *w.judge_score;
    resp.extra["candidates"] = r.candidates.size();
    out.responses.push_back(std::move(resp));
  }
  return out;
}

}  // namespace pipebench::curation

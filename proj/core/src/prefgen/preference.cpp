// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/prefgen/preference.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pipebench/common/parallel.hpp"
#include "pipebench/common/rng.hpp"
#include "pipebench/common/text.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::prefgen {

using nlohmann::json;
namespace reply = gateway::reply;
namespace tasks = gateway::tasks;

namespace {

constexpr corpus::EnumNames<PresentationOrder, 2> kOrderNames{{{
    {PresentationOrder::left_first, "left_first"},
    {PresentationOrder::right_first, "right_first"},
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

json verdict_json(const PairwiseVerdict& v) {
  return {{"left_id", v.left_id},
          {"right_id", v.right_id},
          {"winner_id", v.winner_id},
          {"order", kOrderNames.name(v.order)},
          {"round", v.round}};
}

PairwiseVerdict verdict_from(const json& j) {
  corpus::FieldReader f(j);
  PairwiseVerdict v;
  v.left_id = f.text("left_id");
  v.right_id = f.text("right_id");
  v.winner_id = f.text("winner_id");
  v.order = f.enumerated("order", kOrderNames);
  v.round = f.integer("round");
  return v;
}

void put_opt(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

}  // namespace

void to_json(json& j, const PreferencePair& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["question_id"] = r.question_id;
  j["question_text"] = r.question_text;
  j["reference_answer"] = r.reference_answer;
  j["chosen"] = r.chosen;
  j["rejected"] = r.rejected;
  put_opt(j, "chosen_score", r.chosen_score);
  if (r.domain_label) j["domain_label"] = *r.domain_label;
  j["trail"] = json::array();
  for (const auto& v : r.trail) j["trail"].push_back(verdict_json(v));
  put_opt(j, "logp_policy_chosen", r.logp_policy_chosen);
  put_opt(j, "logp_policy_rejected", r.logp_policy_rejected);
  put_opt(j, "logp_ref_chosen", r.logp_ref_chosen);
  put_opt(j, "logp_ref_rejected", r.logp_ref_rejected);
}

void from_json(const json& j, PreferencePair& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.question_id = f.text("question_id");
  r.question_text = f.text("question_text");
  r.reference_answer = f.text("reference_answer");
  r.chosen = f.raw("chosen").get<corpus::ResponseRecord>();
  r.rejected = f.raw("rejected").get<corpus::ResponseRecord>();
  r.chosen_score = f.opt_real("chosen_score");
  r.domain_label = f.opt_text("domain_label");
  const json& trail = f.raw("trail");
  if (!trail.is_array()) corpus::FieldReader::fail("trail", "must be an array");
  r.trail.clear();
  for (const auto& v : trail) r.trail.push_back(verdict_from(v));
  r.logp_policy_chosen = f.opt_real("logp_policy_chosen");
  r.logp_policy_rejected = f.opt_real("logp_policy_rejected");
  r.logp_ref_chosen = f.opt_real("logp_ref_chosen");
  r.logp_ref_rejected = f.opt_real("logp_ref_rejected");
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const PreferencePair& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  corpus::require_text(v, "question_id", r.question_id);
  for (const auto& [name, resp] : {std::pair{"chosen", &r.chosen}, std::pair{"rejected", &r.rejected}}) {
    for (auto& x : corpus::validate_record(*resp)) v.push_back({std::string(name) + "." + x.field, x.message});
    if (resp->question_id != r.question_id) v.push_back({std::string(name) + ".question_id", "must equal question_id"});
  }
  if (r.chosen.id == r.rejected.id) v.push_back({"rejected", "must differ from chosen"});
  if (r.chosen_score && !(*r.chosen_score >= 0.0 && *r.chosen_score <= 10.0)) {
    v.push_back({"chosen_score", "must be in [0, 10]"});
  }
  for (std::size_t i = 0; i < r.trail.size(); ++i) {
    const auto& t = r.trail[i];
    if (t.winner_id != t.left_id && t.winner_id != t.right_id) {
      v.push_back({"trail[" + std::to_string(i) + "].winner_id", "must be left_id or right_id"});
    }
  }
  return v;
}

SampleOutcome sample_candidates(const corpus::QuestionRecord& question, const StageCall& policy, int n,
                                double temperature) {
  if (n < 2) throw std::invalid_argument("sample_candidates: n must be >= 2");
  if (!(temperature > 0.0)) throw std::invalid_argument("sample_candidates: temperature must be > 0");
  const std::string reference = question.reference_answer.value_or("");
  auto outcomes = bounded_map(static_cast<std::size_t>(n), policy.max_workers, [&](std::size_t i) {
    auto req = policy.prompts.render(tasks::kSampleResponse,
                                     {{"question", question.text},
                                      {"reference", reference},
                                      {"index", std::to_string(i)},
                                      {"count", std::to_string(n)}},
                                     temperature, static_cast<std::int64_t>(i));
    auto text = policy.gw.generate(req, policy.profile).text;
    corpus::ResponseRecord r;
    r.id = question.id + "/s" + std::to_string(i);
    r.question_id = question.id;
    r.model_id = policy.profile;
    if (auto reasoning = reply::field(text, "REASONING")) r.reasoning_text = text::trim(*reasoning);
    auto answer = reply::tail(text, "ANSWER");
    r.answer_text = text::trim(answer ? *answer : text);
    r.sampling_temperature = temperature;
    if (r.answer_text.empty()) throw std::runtime_error("empty response");
    return r;
  });
  SampleOutcome out;
  CandidateSet set{question.id, question.text, reference, {}};
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].ok()) set.responses.push_back(std::move(*outcomes[i].value));
    else out.failures.push_back("sample " + std::to_string(i) + ": " + message_of(outcomes[i].error));
  }
  if (set.responses.size() >= 2) out.set = std::move(set);
  return out;
}

SelectOutcome select_best_worst(const CandidateSet& set, const StageCall& judge, int confirm_rounds,
                                std::uint64_t seed) {
  const std::size_t n = set.responses.size();
  if (n < 2) throw std::invalid_argument("select_best_worst: need at least 2 responses");
  if (confirm_rounds < 2 || confirm_rounds % 2 != 0) {
    throw std::invalid_argument("select_best_worst: confirm_rounds must be even and >= 2");
  }
  SelectOutcome out;
  try {
    std::map<std::string, std::string> vars{{"reference", set.reference_answer},
                                            {"question", set.question_text},
                                            {"count", std::to_string(n)}};
    std::string block;
    for (std::size_t i = 0; i < n; ++i) {
      vars["candidate_" + std::to_string(i + 1)] = set.responses[i].answer_text;
      block += "[" + std::to_string(i + 1) + "] " + set.responses[i].answer_text + "\n";
    }
    vars["candidates"] = block;
    auto text = judge.gw.generate(judge.prompts.render(tasks::kRankCandidates, vars, judge.temperature), judge.profile).text;
    auto order_field = reply::field(text, "ORDER");
    if (!order_field) throw std::runtime_error("no ORDER in ranking output");
    std::vector<std::size_t> order;
    std::set<std::size_t> seen;
    for (const auto& item : reply::split_list(*order_field)) {
      auto k = reply::integer(item);
      if (!k || *k < 1 || static_cast<std::size_t>(*k) > n || !seen.insert(static_cast<std::size_t>(*k)).second) {
        throw std::runtime_error("ranking is not a permutation of 1.." + std::to_string(n));
      }
      order.push_back(static_cast<std::size_t>(*k - 1));
    }
    if (order.size() != n) throw std::runtime_error("ranking is not a permutation of 1.." + std::to_string(n));

    PreferencePair pair;
    pair.id = set.question_id;
    pair.question_id = set.question_id;
    pair.question_text = set.question_text;
    pair.reference_answer = set.reference_answer;
    pair.chosen = set.responses[order.front()];
    pair.rejected = set.responses[order.back()];

    DeterministicRng rng(seed);
    const int start = rng.coin() ? 1 : 0;
    int chosen_wins = 0;
    for (int round = 0; round < confirm_rounds; ++round) {
      PairwiseVerdict v;
      v.order = (start + round) % 2 == 0 ? PresentationOrder::left_first : PresentationOrder::right_first;
      const auto& a = v.order == PresentationOrder::left_first ? pair.chosen : pair.rejected;
      const auto& b = v.order == PresentationOrder::left_first ? pair.rejected : pair.chosen;
      v.left_id = a.id;
      v.right_id = b.id;
      v.round = round + 1;
      auto req = judge.prompts.render(tasks::kJudgePair,
                                      {{"reference", set.reference_answer},
                                       {"question", set.question_text},
                                       {"response_a", a.answer_text},
                                       {"response_b", b.answer_text}},
                                      judge.temperature, round);
      auto w = reply::field(judge.gw.generate(req, judge.profile).text, "WINNER");
      std::string win = w ? reply::lower(text::trim(*w)) : "";
      if (win == "a") v.winner_id = a.id;
      else if (win == "b") v.winner_id = b.id;
      else throw std::runtime_error("no A/B WINNER in round " + std::to_string(round + 1));
      if (v.winner_id == pair.chosen.id) ++chosen_wins;
      pair.trail.push_back(std::move(v));
    }
    out.status = 2 * chosen_wins > confirm_rounds ? SelectStatus::retained : SelectStatus::inconsistent;
    out.detail = "chosen won " + std::to_string(chosen_wins) + "/" + std::to_string(confirm_rounds);
    out.pair = std::move(pair);
  } catch (const std::exception& e) {
    out.status = SelectStatus::unresolved;
    out.detail = e.what();
    out.pair.reset();
  }
  return out;
}

FilterOutcome absolute_score_filter(std::vector<PreferencePair> pairs, const StageCall& judge, double min_score) {
  if (!(min_score >= 0.0 && min_score <= 10.0)) throw std::invalid_argument("absolute_score_filter: min_score must be in [0, 10]");
  auto scores = bounded_map(pairs.size(), judge.max_workers, [&](std::size_t i) {
    auto req = judge.prompts.render(tasks::kScoreResponse,
                                    {{"reference", pairs[i].reference_answer},
                                     {"question", pairs[i].question_text},
                                     {"response", pairs[i].chosen.answer_text}},
                                    judge.temperature);
    auto f = reply::field(judge.gw.generate(req, judge.profile).text, "SCORE");
    auto s = f ? reply::number(*f) : std::nullopt;
    if (!s || !(*s >= 0.0 && *s <= 10.0)) throw std::runtime_error("no SCORE in [0, 10]");
    return *s;
  });
  FilterOutcome out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto& p = pairs[i];
    if (!scores[i].ok()) {
      out.unresolved.push_back({p.id, "absolute_score", "unparseable_judge", message_of(scores[i].error), json::object()});
      continue;
    }
    p.chosen_score = *scores[i].value;
    if (*p.chosen_score >= min_score) {
      out.retained.push_back(std::move(p));
    } else {
      std::ostringstream detail;
      detail << "chosen score " << *p.chosen_score << " < " << min_score;
      out.discarded.push_back({p.id, "absolute_score", "low_score", detail.str(), json::object()});
    }
  }
  return out;
}

FilterOutcome label_domains(std::vector<PreferencePair> pairs, const StageCall& judge,
                            const std::vector<std::string>& labels) {
  if (labels.empty()) throw std::invalid_argument("label_domains: empty label set");
  std::string joined;
  for (const auto& l : labels) joined += (joined.empty() ? "" : ", ") + l;
  auto outcomes = bounded_map(pairs.size(), judge.max_workers, [&](std::size_t i) {
    auto req = judge.prompts.render(tasks::kDomainLabel, {{"question", pairs[i].question_text}, {"labels", joined}},
                                    judge.temperature);
    auto f = reply::field(judge.gw.generate(req, judge.profile).text, "LABEL");
    if (!f) throw std::runtime_error("no LABEL in output");
    std::string got = text::trim(*f);
    for (const auto& l : labels) {
      if (reply::lower(l) == reply::lower(got)) return l;
    }
    throw std::runtime_error("label '" + got + "' is not in the label set");
  });
  FilterOutcome out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!outcomes[i].ok()) {
      out.unresolved.push_back({pairs[i].id, "domain_label", "unparseable_judge", message_of(outcomes[i].error), json::object()});
      continue;
    }
    pairs[i].domain_label = *outcomes[i].value;
    out.retained.push_back(std::move(pairs[i]));
  }
  return out;
}

FilterOutcome domain_balance(std::vector<PreferencePair> pairs, const std::vector<std::string>& labels,
                             std::size_t cap) {
  std::set<std::string, std::less<>> allowed(labels.begin(), labels.end());
  std::string bad;
  for (const auto& p : pairs) {
    if (!p.domain_label || !allowed.contains(*p.domain_label)) bad += (bad.empty() ? "" : ", ") + p.id;
  }
  if (!bad.empty()) throw std::invalid_argument("domain_balance: unlabeled pairs: " + bad);
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::map<std::string, std::size_t, std::less<>> used;
  FilterOutcome out;
  for (auto& p : pairs) {
    if (used[*p.domain_label]++ < cap) {
      out.retained.push_back(std::move(p));
    } else {
      out.discarded.push_back({p.id, "domain_balance", "label_cap", "label '" + *p.domain_label + "' over cap " + std::to_string(cap), json::object()});
    }
  }
  return out;
}

PrefgenResult generate_preferences(const std::vector<corpus::QuestionRecord>& input, gateway::Gateway& gw,
                                   const gateway::PromptLibrary& prompts, const PrefgenParams& p) {
  std::vector<corpus::QuestionRecord> questions = input;
  std::sort(questions.begin(), questions.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  PrefgenResult out;

  StageCall policy{gw, prompts, p.policy_profile, p.temperature, 1};
  StageCall judge{gw, prompts, p.judge_profile, p.judge_temperature, 1};
  auto selected = bounded_map(questions.size(), p.max_workers, [&](std::size_t i) {
    const auto& q = questions[i];
    std::pair<SampleOutcome, std::optional<SelectOutcome>> r;
    r.first = sample_candidates(q, policy, p.samples, p.temperature);
    if (r.first.set) r.second = select_best_worst(*r.first.set, judge, p.confirm_rounds, derive_seed(p.seed, q.id));
    return r;
  });

  StageCount& sample = out.stages["sample"];
  StageCount& select = out.stages["select"];
  std::vector<PreferencePair> pairs;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    ++sample.in;
    if (!selected[i].ok()) {
      ++sample.unresolved;
      out.unresolved.push_back({q.id, "sample", "failed", message_of(selected[i].error), json::object()});
      continue;
    }
    auto& [samp, sel] = *selected[i].value;
    if (!samp.set) {
      ++sample.removed;
      std::string detail = "fewer than 2 successful generations";
      if (!samp.failures.empty()) detail += "; " + samp.failures.front();
      out.removed.push_back({q.id, "sample", "insufficient_samples", detail, json::object()});
      continue;
    }
    ++sample.kept;
    ++select.in;
    switch (sel->status) {
      case SelectStatus::retained:
        ++select.kept;
        pairs.push_back(std::move(*sel->pair));
        break;
      case SelectStatus::inconsistent:
        ++select.removed;
        out.removed.push_back({q.id, "select", "judge_inconsistent", sel->detail, json::object()});
        break;
      case SelectStatus::unresolved:
        ++select.unresolved;
        out.unresolved.push_back({q.id, "select", "unparseable_judge", sel->detail, json::object()});
        break;
    }
  }

  auto account = [&](const char* stage, std::size_t in, FilterOutcome& f) {
    out.stages[stage] = {in, f.retained.size(), f.discarded.size(), f.unresolved.size()};
    for (auto& r : f.discarded) out.removed.push_back(std::move(r));
    for (auto& r : f.unresolved) out.unresolved.push_back(std::move(r));
    return std::move(f.retained);
  };
  judge.max_workers = p.max_workers;
  std::size_t n = pairs.size();
  auto scored = absolute_score_filter(std::move(pairs), judge, p.min_score);
  pairs = account("absolute_score", n, scored);
  n = pairs.size();
  auto labeled = label_domains(std::move(pairs), judge, p.labels);
  pairs = account("domain_label", n, labeled);
  n = pairs.size();
  auto balanced = domain_balance(std::move(pairs), p.labels, p.cap_per_label);
  out.pairs = account("domain_balance", n, balanced);
  return out;
}

}  // namespace pipebench::prefgen

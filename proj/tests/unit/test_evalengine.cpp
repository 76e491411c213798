// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pipebench/corpus/dataset.hpp"
#include "pipebench/evalengine/evaluate.hpp"
#include "pipebench/evalengine/metrics.hpp"
#include "pipebench/evalengine/reference.hpp"
#include "pipebench/evalengine/statements.hpp"
#include "test_support.hpp"

namespace pipebench::evalengine {
namespace {

using corpus::ResponseRecord;
using pipebench::testing::mock_gateway;
using pipebench::testing::prompts;
using pipebench::testing::rule;
using pipebench::testing::source_dir;
using pipebench::testing::TempDir;

ReviewScores scores(int flu, int safe, int logic, int acc, int comp, int prac) {
  ReviewScores s;
  s.grammatical_fluency = flu;
  s.safety = safe;
  s.logical_reasoning = logic;
  s.accuracy = acc;
  s.comprehensiveness = comp;
  s.practicality = prac;
  return s;
}

ResponseRecord response(std::string id, std::string qid, std::string model, std::string text) {
  ResponseRecord r;
  r.id = std::move(id);
  r.question_id = std::move(qid);
  r.model_id = std::move(model);
  r.answer_text = std::move(text);
  return r;
}

// ---- metrics ----

TEST(Metrics, PrecisionRecallRatios) {
  EXPECT_NEAR(answer_precision(2, 3), 0.666667, 5e-7);
  EXPECT_DOUBLE_EQ(answer_precision(3, 3), 1.0);
  EXPECT_DOUBLE_EQ(answer_recall(0, 4), 0.0);
  EXPECT_DOUBLE_EQ(answer_recall(4, 4), 1.0);
  EXPECT_DOUBLE_EQ(answer_recall(1, 4), 0.25);
  EXPECT_THROW(answer_precision(0, 0), std::invalid_argument);
  EXPECT_THROW(answer_recall(5, 4), std::invalid_argument);
  auto pr = precision_recall(2, 3, 1, 4);
  EXPECT_EQ(pr.n_resp, 3u);
  EXPECT_EQ(pr.n_gt, 4u);
  EXPECT_DOUBLE_EQ(pr.recall, 0.25);
}

TEST(Metrics, FinalScoreMatchesPublishedRow) {
  // Mean precision, mean recall and weighted score per published model.
  const double p[] = {0.4564, 0.4714, 0.4696, 0.4747, 0.4563, 0.3533, 0.399};
  const double r[] = {0.3276, 0.3465, 0.3661, 0.3453, 0.3306, 0.4076, 0.4006};
  const double w[] = {0.3663, 0.384, 0.3971, 0.3842, 0.3683, 0.3913, 0.4001};
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(final_score(p[i], r[i]), w[i], 5e-4) << "column " << i;
}

TEST(Metrics, FinalScoreLinearAndMonotone) {
  for (double x : {0.0, 0.25, 0.5, 1.0}) EXPECT_NEAR(final_score(x, x), x, 1e-15);
  EXPECT_LT(final_score(0.2, 0.5), final_score(0.3, 0.5));
  EXPECT_LT(final_score(0.5, 0.2), final_score(0.5, 0.3));
  EXPECT_NEAR(final_score(0.4, 0.6, {0.5, 0.5}), 0.5, 1e-15);
  EXPECT_THROW(final_score(1.1, 0.5), std::invalid_argument);
  EXPECT_THROW(final_score(0.5, 0.5, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(final_score(0.5, 0.5, {-0.1, 1.1}), std::invalid_argument);
}

TEST(Metrics, RankModelsCompetition) {
  std::map<std::string, double> s{{"base", 0.3663}, {"sft1", 0.3840}, {"sft2", 0.3971}, {"sft3", 0.3842},
                                  {"sft4", 0.3683}, {"rl1", 0.3913},  {"rl2", 0.4001}};
  std::map<std::string, int> expected{{"base", 7}, {"sft1", 5}, {"sft2", 2}, {"sft3", 4},
                                      {"sft4", 6}, {"rl1", 3},  {"rl2", 1}};
  EXPECT_EQ(rank_models(s), expected);
  EXPECT_EQ(rank_models({{"a", 0.5}, {"b", 0.5}, {"c", 0.1}}), (std::map<std::string, int>{{"a", 1}, {"b", 1}, {"c", 3}}));
  EXPECT_EQ(rank_models({{"a", 0.9}, {"b", 0.1}}), (std::map<std::string, int>{{"a", 1}, {"b", 2}}));
  EXPECT_THROW(rank_models({{"a", 0.1}}), std::invalid_argument);
  EXPECT_THROW(rank_models({{"a", 0.1}, {"b", std::nan("")}}), std::invalid_argument);
}

TEST(Metrics, WeightedHumanScore) {
  EXPECT_DOUBLE_EQ(weighted_human_score(scores(3, 3, 3, 3, 3, 3)), 3.0);
  // fluency, safety(0), logic, accuracy, comprehensiveness, practicality.
  EXPECT_NEAR(weighted_human_score(scores(3, 0, 3, 3, 3, 3)), 2.7, 1e-12);
  EXPECT_NEAR(weighted_human_score(scores(3, 3, 2, 2, 2, 2)), 2.2, 1e-12);
  int total = 0;
  for (const auto& w : kCriterionWeights) total += w.percent;
  EXPECT_EQ(total, 100);
  EXPECT_THROW(weighted_human_score(scores(3, 2, 3, 3, 3, 3)), std::invalid_argument);
  EXPECT_THROW(weighted_human_score(scores(4, 3, 3, 3, 3, 3)), std::invalid_argument);
  EXPECT_THROW(weighted_human_score(scores(3, 3, -1, 3, 3, 3)), std::invalid_argument);
}

TEST(Metrics, AcceptableRate) {
  std::vector<ReviewScores> one{scores(0, 0, 0, 2, 2, 2)};
  EXPECT_DOUBLE_EQ(acceptable_rate(one), 1.0);
  one[0].practicality = 1;
  EXPECT_DOUBLE_EQ(acceptable_rate(one), 0.0);
  EXPECT_THROW(acceptable_rate(std::vector<ReviewScores>{}), std::invalid_argument);

  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(0, 3);
  std::vector<ReviewScores> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(scores(d(rng), d(rng) < 2 ? 0 : 3, d(rng), d(rng), d(rng), d(rng)));
  int count = 0;
  for (const auto& s : ten) count += (s.accuracy >= 2 && s.comprehensiveness >= 2 && s.practicality >= 2) ? 1 : 0;
  EXPECT_DOUBLE_EQ(acceptable_rate(ten), count / 10.0);
  std::reverse(ten.begin(), ten.end());
  EXPECT_DOUBLE_EQ(acceptable_rate(ten), count / 10.0);
}

TEST(Metrics, ScoresJsonRoundTrip) {
  auto s = scores(1, 3, 2, 0, 3, 1);
  nlohmann::json j = s;
  EXPECT_EQ(j.get<ReviewScores>(), s);
  EXPECT_EQ(scores(1, 1, 1, 1, 1, 1).validate().size(), 1u);
  EXPECT_EQ(scores(1, 1, 1, 1, 1, 1).validate()[0].field, "safety");
}

// ---- reference preparation ----

TEST(Reference, StandardizeSingleIsIdentity) {
  auto gw = mock_gateway({"std"});
  curation::StageCall call{*gw, prompts(), "std"};
  auto out = standardize_reference({{"r1", "Blue emitters age fastest."}}, call);
  EXPECT_EQ(out.text, "Blue emitters age fastest.");
  EXPECT_EQ(out.provenance, (std::vector<std::string>{"r1"}));
  EXPECT_THROW(standardize_reference({}, call), std::invalid_argument);
}

TEST(Reference, StandardizeMergesWithProvenance) {
  auto gw = mock_gateway({"std"}, {rule("reference_standardize", {}, "Merged reference text.")});
  curation::StageCall call{*gw, prompts(), "std"};
  auto out = standardize_reference({{"r1", "First view."}, {"r2", "Second view."}}, call);
  EXPECT_EQ(out.text, "Merged reference text.");
  EXPECT_EQ(out.provenance, (std::vector<std::string>{"r1", "r2"}));
}

TEST(Reference, RefineDropsQuotation) {
  auto gw = mock_gateway({"ref"});
  curation::StageCall call{*gw, prompts(), "ref"};
  const std::string in = "Barrier films block moisture.\n\n> As the datasheet says, films matter.\n\nThin films crack when bent.";
  auto out = refine_reference(in, call);
  EXPECT_EQ(out.text, "Barrier films block moisture.\n\nThin films crack when bent.");
  ASSERT_EQ(out.removed.size(), 1u);
  for (const auto& s : out.removed) {
    EXPECT_LE(s.end, in.size());
    EXPECT_LT(s.begin, s.end);
  }
  EXPECT_EQ(in.substr(out.removed[0].begin, 2), "> ");
}

TEST(Reference, RefineIdentityWhenNothingRemovable) {
  auto gw = mock_gateway({"ref"});
  curation::StageCall call{*gw, prompts(), "ref"};
  const std::string in = "  Plain paragraph one.\n\n\nPlain paragraph two.  \n";
  auto out = refine_reference(in, call);
  EXPECT_EQ(out.text, in);
  EXPECT_TRUE(out.removed.empty());
  for (const auto& s : segment_paragraphs(in)) EXPECT_LE(s.end, in.size());
  EXPECT_EQ(segment_paragraphs(in).size(), 2u);
  EXPECT_THROW(refine_reference("   ", call), std::invalid_argument);
}

TEST(Reference, RefineRejectsOutOfRangeSegment) {
  auto gw = mock_gateway({"ref"}, {rule("reference_refine", {}, "REMOVE: 7")});
  curation::StageCall call{*gw, prompts(), "ref"};
  EXPECT_THROW(refine_reference("one\n\ntwo", call), std::runtime_error);
}

// ---- statements and verdicts ----

TEST(Statements, SentenceSplittingAndCache) {
  auto gw = mock_gateway({"ex"});
  curation::StageCall ex{*gw, prompts(), "ex"};
  StatementCache cache;
  const std::string text = "Blue excitons carry high energy. They break bonds. Products quench emission.";
  auto a = extract_statements(text, StatementSource::response, "resp1", ex, cache);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].id, "resp1:r1");
  EXPECT_EQ(a[0].parent_id, "resp1");
  EXPECT_EQ(gw->task_stats("extract_statements").calls, 1);
  auto b = extract_statements(text, StatementSource::response, "resp1", ex, cache);
  EXPECT_EQ(a, b);
  EXPECT_EQ(gw->task_stats("extract_statements").calls, 1);
  // Role is part of the key.
  auto g = extract_statements(text, StatementSource::ground_truth, "case1", ex, cache);
  EXPECT_EQ(g[0].id, "case1:g1");
  EXPECT_EQ(gw->task_stats("extract_statements").calls, 2);
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_THROW(extract_statements("  \n", StatementSource::response, "x", ex, cache), std::invalid_argument);
}

TEST(Statements, EmptyExtractionIsError) {
  auto gw = mock_gateway({"ex"}, {rule("extract_statements", {}, "NONE")});
  curation::StageCall ex{*gw, prompts(), "ex"};
  StatementCache cache;
  EXPECT_THROW(extract_statements("Some text.", StatementSource::response, "x", ex, cache), std::runtime_error);
}

TEST(Statements, CachePersists) {
  TempDir tmp;
  auto gw = mock_gateway({"ex"});
  curation::StageCall ex{*gw, prompts(), "ex"};
  StatementCache cache = StatementCache::load(tmp / "cache.jsonl");
  EXPECT_EQ(cache.size(), 0u);
  auto a = extract_statements("One fact. Two facts.", StatementSource::response, "p", ex, cache);
  cache.save(tmp / "cache.jsonl");
  auto reloaded = StatementCache::load(tmp / "cache.jsonl");
  auto gw2 = mock_gateway({"ex"});
  curation::StageCall ex2{*gw2, prompts(), "ex"};
  EXPECT_EQ(extract_statements("One fact. Two facts.", StatementSource::response, "p", ex2, reloaded), a);
  EXPECT_EQ(gw2->total_calls(), 0);
}

TEST(Statements, KeyDependsOnModel) {
  EXPECT_NE(StatementCache::key("t", StatementSource::response, "m1"), StatementCache::key("t", StatementSource::response, "m2"));
  EXPECT_NE(StatementCache::key("t", StatementSource::response, "m"), StatementCache::key("t", StatementSource::ground_truth, "m"));
  EXPECT_EQ(StatementCache::key("t", StatementSource::response, "m"), StatementCache::key("t", StatementSource::response, "m"));
}

TEST(Verdicts, ContainmentJudge) {
  auto gw = mock_gateway({"judge"});
  curation::StageCall judge{*gw, prompts(), "judge"};
  Statement s{"x:r0", StatementSource::response, "triplet polaron quenching removes excitons", "x"};
  auto yes = judge_support(s, "In OLEDs triplet polaron quenching removes excitons at high current.", judge);
  ASSERT_TRUE(yes.verdict);
  EXPECT_TRUE(yes.verdict->supported);
  EXPECT_EQ(yes.verdict->judge_model, "judge-model");
  EXPECT_FALSE(yes.verdict->raw_hash.empty());
  auto no = judge_support(s, "Liquid crystals rotate polarized light.", judge);
  ASSERT_TRUE(no.verdict);
  EXPECT_FALSE(no.verdict->supported);
  EXPECT_THROW(judge_support(s, "", judge), std::invalid_argument);
}

TEST(Verdicts, ProseIsUnresolved) {
  auto gw = mock_gateway({"judge"}, {rule("judge_support", {}, "It seems plausible overall.")});
  curation::StageCall judge{*gw, prompts(), "judge"};
  Statement s{"x:r0", StatementSource::response, "a claim", "x"};
  auto out = judge_support(s, "context", judge);
  EXPECT_FALSE(out.verdict);
  EXPECT_FALSE(out.error.empty());
}

// ---- end to end ----

TEST(Evaluate, IdentityResponseScoresOne) {
  auto gw = mock_gateway({"ex", "judge"});
  curation::StageCall ex{*gw, prompts(), "ex"}, judge{*gw, prompts(), "judge"};
  StatementCache cache;
  EvalCase c{"c1", "What limits roll off?", "Roll off comes from annihilation. Quenching also matters.", {}};
  auto r = evaluate_case(c, response("c1/m", "c1", "m", c.ground_truth), ex, judge, cache);
  ASSERT_TRUE(r.complete) << r.error;
  EXPECT_DOUBLE_EQ(r.pr->precision, 1.0);
  EXPECT_DOUBLE_EQ(r.pr->recall, 1.0);
  EXPECT_DOUBLE_EQ(*r.final_score, 1.0);
  EXPECT_EQ(r.precision_trace.size(), 2u);
  EXPECT_EQ(r.recall_trace.size(), 2u);
}

TEST(Evaluate, PartialResponse) {
  auto gw = mock_gateway({"ex", "judge"});
  curation::StageCall ex{*gw, prompts(), "ex"}, judge{*gw, prompts(), "judge"};
  StatementCache cache;
  EvalCase c{"c1", "q", "Fact one holds. Fact two holds. Fact three holds. Fact four holds.", {}};
  auto r = evaluate_case(c, response("c1/m", "c1", "m", "Fact one holds. Bananas are blue."), ex, judge, cache);
  ASSERT_TRUE(r.complete);
  EXPECT_EQ(r.pr->n_resp, 2u);
  EXPECT_EQ(r.pr->n_correct_in_resp, 1u);
  EXPECT_EQ(r.pr->n_gt, 4u);
  EXPECT_EQ(r.pr->n_recalled_from_gt, 1u);
  EXPECT_NEAR(*r.final_score, 0.3 * 0.5 + 0.7 * 0.25, 1e-15);
}

TEST(Evaluate, UnresolvedMarksIncomplete) {
  auto gw = mock_gateway({"ex", "judge"}, {rule("judge_support", {{"statement", "Bananas"}}, "unclear")});
  curation::StageCall ex{*gw, prompts(), "ex"}, judge{*gw, prompts(), "judge"};
  StatementCache cache;
  EvalCase c{"c1", "q", "Fact one holds.", {}};
  auto r = evaluate_case(c, response("c1/m", "c1", "m", "Fact one holds. Bananas are blue."), ex, judge, cache);
  EXPECT_FALSE(r.complete);
  EXPECT_FALSE(r.pr);
  EXPECT_FALSE(r.final_score);
  EXPECT_NE(r.error.find("unresolved"), std::string::npos);
  EXPECT_FALSE(to_json(r)["precision_trace"][1].contains("supported"));
}

TEST(Evaluate, FixtureCorpusReproducibleWithWarmCache) {
  auto cases = corpus::read_dataset<EvalCase>(source_dir() / "fixtures" / "eval_cases.jsonl").records;
  auto outputs = corpus::read_dataset<ResponseRecord>(source_dir() / "fixtures" / "model_outputs.jsonl").records;
  auto gw = mock_gateway({"ex", "judge"});
  curation::StageCall ex{*gw, prompts(), "ex"}, judge{*gw, prompts(), "judge"};
  StatementCache cache;
  auto a = evaluate_all(cases, outputs, ex, judge, cache);
  const auto extracted = gw->task_stats("extract_statements").calls;
  EXPECT_GT(extracted, 0);
  auto b = evaluate_all(cases, outputs, ex, judge, cache);
  EXPECT_EQ(gw->task_stats("extract_statements").calls, extracted);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(a.results.size(), outputs.size());
  EXPECT_EQ(a.incomplete(), 0u);
  for (const auto& r : a.results) {
    ASSERT_TRUE(r.final_score);
    EXPECT_GE(*r.final_score, 0.0);
    EXPECT_LE(*r.final_score, 1.0);
  }
  EXPECT_EQ(a.models.size(), 3u);
  EXPECT_EQ(a.ranking.size(), 3u);
  for (const auto& [m, s] : a.models) EXPECT_NEAR(s.weighted, final_score(s.mean_precision, s.mean_recall), 1e-12);
}

TEST(Evaluate, UnknownCaseRejected) {
  auto gw = mock_gateway({"ex", "judge"});
  curation::StageCall ex{*gw, prompts(), "ex"}, judge{*gw, prompts(), "judge"};
  StatementCache cache;
  std::vector<EvalCase> cases{{"c1", "q", "Fact.", {}}};
  std::vector<ResponseRecord> outs{response("c9/m", "c9", "m", "Fact.")};
  EXPECT_THROW(evaluate_all(cases, outs, ex, judge, cache), std::invalid_argument);
}

}  // namespace
}  // namespace pipebench::evalengine

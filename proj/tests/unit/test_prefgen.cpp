// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pipebench/common/rng.hpp"
#include "pipebench/prefgen/dpo.hpp"
#include "pipebench/prefgen/preference.hpp"
#include "test_support.hpp"

namespace pipebench::prefgen {
namespace {

using corpus::QuestionRecord;
using corpus::ResponseRecord;
using pipebench::testing::mock_gateway;
using pipebench::testing::oracle;
using pipebench::testing::prompts;
using pipebench::testing::rule;

const std::string kReference =
    "Pixel aging in OLED panels comes from emitter degradation that lowers luminance and shifts color over time";

QuestionRecord question(std::string id, std::string text = "How does OLED pixel aging progress?") {
  QuestionRecord q;
  q.id = std::move(id);
  q.text = std::move(text);
  q.reference_answer = kReference;
  return q;
}

ResponseRecord response(std::string id, std::string answer) {
  ResponseRecord r;
  r.id = std::move(id);
  r.question_id = "q";
  r.model_id = "policy";
  r.answer_text = std::move(answer);
  r.sampling_temperature = 0.9;
  return r;
}

CandidateSet four_candidates() {
  // Coverage of the reference words orders these 1 > 3 > 2 > 0.
  CandidateSet s{"q", "How does OLED pixel aging progress?", kReference, {}};
  s.responses = {response("q/s0", "unrelated words only"),
                 response("q/s1", kReference),
                 response("q/s2", "Pixel aging in OLED panels"),
                 response("q/s3", "Pixel aging in OLED panels comes from emitter degradation")};
  return s;
}

PreferencePair pair(std::string id, std::optional<std::string> label = std::nullopt) {
  PreferencePair p;
  p.id = id;
  p.question_id = id;
  p.question_text = "How does OLED pixel aging progress?";
  p.reference_answer = kReference;
  p.chosen = response(id + "/s0", "chosen " + id);
  p.chosen.question_id = id;
  p.rejected = response(id + "/s1", "rejected " + id);
  p.rejected.question_id = id;
  p.domain_label = std::move(label);
  return p;
}

DpoItem item(double pc, double pr, double rc, double rr, std::string id = "i") {
  return DpoItem{std::move(id), pc, pr, rc, rr, {}};
}

// ------------------------------------------------------------- sampling

TEST(Sample, FourDeterministicDistinctResponses) {
  auto gw = mock_gateway({"policy"});
  StageCall call{*gw, prompts(), "policy", 0.9, 4};
  auto a = sample_candidates(question("q1"), call, 4, 0.9);
  auto b = sample_candidates(question("q1"), call, 4, 0.9);
  ASSERT_TRUE(a.set);
  ASSERT_EQ(a.set->responses.size(), 4u);
  EXPECT_EQ(a.set->responses, b.set->responses);
  std::set<std::string> texts;
  for (const auto& r : a.set->responses) {
    EXPECT_EQ(r.question_id, "q1");
    EXPECT_DOUBLE_EQ(r.sampling_temperature, 0.9);
    texts.insert(r.answer_text);
  }
  EXPECT_EQ(texts.size(), 4u);
}

TEST(Sample, OneFailureOfTwoSkipsQuestion) {
  gateway::MockRule fail;
  fail.task = "sample_response";
  fail.when = {{"index", "1"}};
  fail.error = gateway::GatewayErrc::transport;
  auto gw = mock_gateway({"policy"}, {fail});
  StageCall call{*gw, prompts(), "policy", 0.9, 2};
  auto r = sample_candidates(question("q1"), call, 2, 0.9);
  EXPECT_FALSE(r.set);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_NE(r.failures[0].find("sample 1"), std::string::npos);
  EXPECT_THROW(sample_candidates(question("q1"), call, 1, 0.9), std::invalid_argument);
  EXPECT_THROW(sample_candidates(question("q1"), call, 4, 0.0), std::invalid_argument);
}

// ------------------------------------------------------------ selection

TEST(Select, FixedOrderJudgePicksBestAndWorst) {
  auto gw = mock_gateway({"judge"});
  StageCall call{*gw, prompts(), "judge", 0.0, 1};
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto r = select_best_worst(four_candidates(), call, 2, seed);
    ASSERT_EQ(r.status, SelectStatus::retained) << r.detail;
    EXPECT_EQ(r.pair->chosen.id, "q/s1");
    EXPECT_EQ(r.pair->rejected.id, "q/s0");
    ASSERT_EQ(r.pair->trail.size(), 2u);
    // Both presentation orders appear.
    EXPECT_NE(r.pair->trail[0].order, r.pair->trail[1].order);
    for (const auto& v : r.pair->trail) EXPECT_EQ(v.winner_id, "q/s1");
  }
}

TEST(Select, PositionBiasedJudgeIsInconsistent) {
  auto gw = mock_gateway({"judge"}, {rule("judge_pair", {}, "WINNER: A")});
  StageCall call{*gw, prompts(), "judge", 0.0, 1};
  auto r = select_best_worst(four_candidates(), call, 2, 5);
  EXPECT_EQ(r.status, SelectStatus::inconsistent);
  auto r4 = select_best_worst(four_candidates(), call, 4, 5);
  EXPECT_EQ(r4.status, SelectStatus::inconsistent);
  EXPECT_EQ(r4.pair->trail.size(), 4u);
}

TEST(Select, UnparseableJudgeIsUnresolved) {
  auto gw = mock_gateway({"judge"}, {rule("rank_candidates", {}, "ORDER: 1, 1, 2, 3")});
  StageCall call{*gw, prompts(), "judge", 0.0, 1};
  EXPECT_EQ(select_best_worst(four_candidates(), call, 2, 0).status, SelectStatus::unresolved);
  auto gw2 = mock_gateway({"judge"}, {rule("judge_pair", {}, "both are fine")});
  StageCall call2{*gw2, prompts(), "judge", 0.0, 1};
  EXPECT_EQ(select_best_worst(four_candidates(), call2, 2, 0).status, SelectStatus::unresolved);
  EXPECT_THROW(select_best_worst(four_candidates(), call, 3, 0), std::invalid_argument);
  EXPECT_THROW(select_best_worst(four_candidates(), call, 0, 0), std::invalid_argument);
}

TEST(Select, ChosenNeverEqualsRejected) {
  auto gw = mock_gateway({"policy", "judge"});
  StageCall policy{*gw, prompts(), "policy", 0.9, 2};
  StageCall judge{*gw, prompts(), "judge", 0.0, 2};
  for (int i = 0; i < 20; ++i) {
    auto q = question("q" + std::to_string(i), "Question number " + std::to_string(i) + " about OLED aging?");
    auto s = sample_candidates(q, policy, 4, 0.9);
    ASSERT_TRUE(s.set);
    auto r = select_best_worst(*s.set, judge, 2, static_cast<std::uint64_t>(i));
    if (r.pair) {
      EXPECT_NE(r.pair->chosen.id, r.pair->rejected.id);
    }
  }
}

// -------------------------------------------------------- score filter

TEST(ScoreFilter, SixIsRetainedBelowIsDiscarded) {
  auto gw = mock_gateway({"judge"}, {rule("score_response", {{"response", "chosen a"}}, "SCORE: 6.0"),
                                     rule("score_response", {{"response", "chosen b"}}, "SCORE: 5.9"),
                                     rule("score_response", {{"response", "chosen c"}}, "SCORE: 9"),
                                     rule("score_response", {{"response", "chosen d"}}, "SCORE: eleven")});
  StageCall call{*gw, prompts(), "judge", 0.0, 2};
  auto r = absolute_score_filter({pair("a"), pair("b"), pair("c"), pair("d")}, call, 6.0);
  ASSERT_EQ(r.retained.size(), 2u);
  EXPECT_EQ(r.retained[0].id, "a");
  EXPECT_EQ(r.retained[0].chosen_score, 6.0);
  ASSERT_EQ(r.discarded.size(), 1u);
  EXPECT_EQ(r.discarded[0].id, "b");
  ASSERT_EQ(r.unresolved.size(), 1u);
  EXPECT_EQ(r.unresolved[0].id, "d");
  EXPECT_THROW(absolute_score_filter({}, call, 10.5), std::invalid_argument);
}

TEST(ScoreFilter, RaisingThresholdNeverAddsPairs) {
  auto gw = mock_gateway({"judge"});
  StageCall call{*gw, prompts(), "judge", 0.0, 2};
  std::vector<PreferencePair> ps;
  DeterministicRng rng(4);
  for (int i = 0; i < 30; ++i) {
    auto p = pair("p" + std::to_string(i));
    std::string words;
    auto refw = text::words(kReference);
    for (const auto& w : refw) {
      if (rng.coin()) words += w + " ";
    }
    p.chosen.answer_text = words.empty() ? "nothing" : words;
    ps.push_back(p);
  }
  std::set<std::string> prev;
  bool first = true;
  for (double t = 0.0; t <= 10.0; t += 0.5) {
    auto r = absolute_score_filter(ps, call, t);
    std::set<std::string> now;
    for (const auto& p : r.retained) now.insert(p.id);
    if (!first) {
      for (const auto& id : now) EXPECT_TRUE(prev.count(id)) << id << " at " << t;
    }
    EXPECT_EQ(r.retained.size() + r.discarded.size() + r.unresolved.size(), ps.size());
    prev = now;
    first = false;
  }
}

// ------------------------------------------------------------ balancing

TEST(Balance, CapArithmetic) {
  std::vector<PreferencePair> ps;
  for (int i = 0; i < 5; ++i) ps.push_back(pair("a" + std::to_string(4 - i), "A"));
  for (int i = 0; i < 2; ++i) ps.push_back(pair("b" + std::to_string(i), "B"));
  auto r = domain_balance(ps, {"A", "B"}, 3);
  std::map<std::string, int> counts;
  for (const auto& p : r.retained) counts[*p.domain_label]++;
  EXPECT_EQ(counts["A"], 3);
  EXPECT_EQ(counts["B"], 2);
  std::vector<std::string> a_ids;
  for (const auto& p : r.retained) {
    if (p.domain_label == "A") a_ids.push_back(p.id);
  }
  EXPECT_EQ(a_ids, (std::vector<std::string>{"a0", "a1", "a2"}));
  EXPECT_EQ(r.discarded.size(), 2u);
  EXPECT_EQ(domain_balance(ps, {"A", "B"}, 5).retained.size(), 7u);
}

TEST(Balance, UnlabeledPairsListed) {
  std::vector<PreferencePair> ps = {pair("x", "A"), pair("y"), pair("z", "C")};
  try {
    domain_balance(ps, {"A", "B"}, 3);
    FAIL();
  } catch (const std::invalid_argument& e) {
    std::string what = e.what();
    EXPECT_NE(what.find("y"), std::string::npos);
    EXPECT_NE(what.find("z"), std::string::npos);
  }
}

TEST(Balance, CountsNeverExceedCap) {
  DeterministicRng rng(8);
  std::vector<std::string> labels = {"A", "B", "C", "D"};
  for (int t = 0; t < 100; ++t) {
    std::vector<PreferencePair> ps;
    auto n = rng.below(40);
    for (std::uint64_t i = 0; i < n; ++i) ps.push_back(pair("p" + std::to_string(i), labels[rng.below(4)]));
    std::size_t cap = rng.below(6);
    auto r = domain_balance(ps, labels, cap);
    std::map<std::string, std::size_t> counts;
    for (const auto& p : r.retained) counts[*p.domain_label]++;
    for (const auto& [_, c] : counts) EXPECT_LE(c, cap);
    EXPECT_EQ(r.retained.size() + r.discarded.size(), ps.size());
  }
}

TEST(Label, RepliesOutsideSetAreUnresolved) {
  auto gw = mock_gateway({"judge"}, {rule("domain_label", {{"question", "weird"}}, "LABEL: Plasma")});
  StageCall call{*gw, prompts(), "judge", 0.0, 2};
  auto p1 = pair("p1");
  p1.question_text = "Why do OLED emitters degrade?";
  auto p2 = pair("p2");
  p2.question_text = "A weird question";
  auto r = label_domains({p1, p2}, call, {"OLED", "LCD"});
  ASSERT_EQ(r.retained.size(), 1u);
  EXPECT_EQ(r.retained[0].domain_label, "OLED");
  ASSERT_EQ(r.unresolved.size(), 1u);
  EXPECT_EQ(r.unresolved[0].id, "p2");
}

TEST(Prefgen, EndToEndConservesCounts) {
  auto gw = mock_gateway({"policy", "judge"});
  std::vector<QuestionRecord> qs;
  for (int i = 0; i < 12; ++i) {
    qs.push_back(question("q" + std::to_string(10 + i),
                          std::string(i % 2 ? "How do OLED" : "Why does LCD") + " panels age, case " + std::to_string(i) + "?"));
  }
  PrefgenParams p;
  p.policy_profile = "policy";
  p.judge_profile = "judge";
  p.labels = {"OLED", "LCD"};
  p.cap_per_label = 3;
  p.seed = 42;
  auto r = generate_preferences(qs, *gw, prompts(), p);
  for (const auto& [stage, c] : r.stages) EXPECT_EQ(c.in, c.kept + c.removed + c.unresolved) << stage;
  EXPECT_EQ(r.pairs.size() + r.removed.size() + r.unresolved.size(), qs.size());
  for (const auto& pp : r.pairs) {
    EXPECT_GE(*pp.chosen_score, 6.0);
    EXPECT_NE(pp.chosen.id, pp.rejected.id);
    EXPECT_TRUE(pp.domain_label);
  }
  auto again = generate_preferences(qs, *mock_gateway({"policy", "judge"}), prompts(), p);
  EXPECT_EQ(again.pairs, r.pairs);
}

// ------------------------------------------------------------------ DPO

TEST(Dpo, PolicyEqualsReferenceGivesLn2) {
  std::vector<DpoItem> b = {item(-3, -7, -3, -7), item(-1.5, -2.5, -1.5, -2.5)};
  auto r = dpo_loss(b, 0.1);
  for (double l : r.losses) EXPECT_NEAR(l, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.mean_loss, std::log(2.0), 1e-12);
  for (double p : r.preference_probability) EXPECT_DOUBLE_EQ(p, 0.5);
}

TEST(Dpo, FixedMarginsMatchHighPrecisionOracle) {
  auto o = oracle("dpo.json");
  // beta = 1 with margin components (+1, -1): delta = 2.
  auto r = dpo_loss(std::vector<DpoItem>{item(1, -1, 0, 0)}, 1.0);
  EXPECT_NEAR(r.margins[0], 2.0, 1e-15);
  EXPECT_NEAR(r.mean_loss, 0.126928, 5e-7);
  EXPECT_NEAR(r.mean_loss, neg_log_sigmoid(2.0), 1e-15);
  for (const auto& f : o["fixed"]) {
    std::vector<DpoItem> b;
    for (double m : f["margins"]) b.push_back(item(m, 0, 0, 0));
    EXPECT_NEAR(dpo_loss(b, f["beta"]).mean_loss, f["mean_loss"].get<double>(), 1e-14);
  }
}

TEST(Dpo, RandomBatchMatchesOracle) {
  auto o = oracle("dpo.json");
  std::vector<DpoItem> b;
  for (const auto& it : o["items"]) b.push_back(item(it["policy_chosen"], it["policy_rejected"], it["ref_chosen"], it["ref_rejected"]));
  auto r = dpo_loss(b, o["beta"]);
  EXPECT_NEAR(r.mean_loss, o["mean_loss"].get<double>(), 1e-12);
  auto g = dpo_gradient(b, o["beta"]);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_NEAR(r.losses[i], o["items"][i]["loss"].get<double>(), 1e-12);
    EXPECT_NEAR(g[i][0] * static_cast<double>(b.size()), o["items"][i]["grad_policy_chosen"].get<double>(), 1e-12);
    EXPECT_DOUBLE_EQ(g[i][1], -g[i][0]);
    EXPECT_DOUBLE_EQ(g[i][2], -g[i][0]);
    EXPECT_DOUBLE_EQ(g[i][3], g[i][0]);
  }
}

TEST(Dpo, StableForHugeMargins) {
  for (double m : {700.0, 1e4, -700.0, -1e4}) {
    auto r = dpo_loss(std::vector<DpoItem>{item(m, 0, 0, 0)}, 1.0);
    EXPECT_TRUE(std::isfinite(r.mean_loss)) << m;
    if (m > 0) {
      EXPECT_LT(r.mean_loss, 1e-300);
      EXPECT_GE(r.mean_loss, 0.0);
    } else {
      EXPECT_NEAR(r.mean_loss, -m, 1e-9 * -m);
    }
    EXPECT_TRUE(std::isfinite(r.preference_probability[0]));
  }
}

TEST(Dpo, MirroredItemsSumToOneAndLossDecreasing) {
  DeterministicRng rng(12);
  double prev = std::numeric_limits<double>::infinity();
  for (int i = -200; i <= 200; ++i) {
    double d = i * 0.1;
    double l = neg_log_sigmoid(d);
    EXPECT_LT(l, prev);
    prev = l;
  }
  for (int t = 0; t < 200; ++t) {
    double a = -50 * rng.unit(), b = -50 * rng.unit(), c = -50 * rng.unit(), e = -50 * rng.unit();
    auto r = dpo_loss(std::vector<DpoItem>{item(a, b, c, e), item(b, a, e, c)}, 0.5);
    EXPECT_DOUBLE_EQ(r.preference_probability[0] + r.preference_probability[1], 1.0);
  }
}

TEST(Dpo, FiniteDifferencesMatchAnalyticGradient) {
  DeterministicRng rng(31);
  std::vector<DpoItem> b;
  for (int i = 0; i < 100; ++i) {
    b.push_back(item(-40 * rng.unit() - 1, -40 * rng.unit() - 1, -40 * rng.unit() - 1, -40 * rng.unit() - 1,
                     "i" + std::to_string(i)));
  }
  const double beta = 0.1, h = 1e-6;
  auto g = dpo_gradient(b, beta);
  double* fields[4];
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto copy = b;
    fields[0] = &copy[i].logp_policy_chosen;
    fields[1] = &copy[i].logp_policy_rejected;
    fields[2] = &copy[i].logp_ref_chosen;
    fields[3] = &copy[i].logp_ref_rejected;
    for (int f = 0; f < 4; ++f) {
      double x = *fields[f];
      *fields[f] = x + h;
      double up = dpo_loss(copy, beta).mean_loss;
      *fields[f] = x - h;
      double down = dpo_loss(copy, beta).mean_loss;
      *fields[f] = x;
      double numeric = (up - down) / (2 * h);
      EXPECT_NEAR(numeric, g[i][f], 1e-6 * std::abs(g[i][f]) + 1e-9) << "item " << i << " field " << f;
    }
  }
}

TEST(Dpo, Preconditions) {
  EXPECT_THROW(dpo_loss(std::vector<DpoItem>{}, 0.1), std::invalid_argument);
  EXPECT_THROW(dpo_loss(std::vector<DpoItem>{item(0, 0, 0, 0)}, 0.0), std::invalid_argument);
  EXPECT_THROW(dpo_loss(std::vector<DpoItem>{item(std::nan(""), 0, 0, 0)}, 0.1), std::invalid_argument);
  EXPECT_THROW(dpo_loss(std::vector<DpoItem>{item(INFINITY, 0, 0, 0)}, 0.1), std::invalid_argument);
}

}  // namespace
}  // namespace pipebench::prefgen

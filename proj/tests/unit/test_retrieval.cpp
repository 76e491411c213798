// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pipebench/common/text.hpp"
#include "pipebench/corpus/dataset.hpp"
#include "pipebench/retrieval/bm25.hpp"
#include "pipebench/retrieval/index.hpp"
#include "pipebench/retrieval/iterative.hpp"
#include "pipebench/retrieval/negatives.hpp"
#include "pipebench/retrieval/ragsft.hpp"
#include "test_support.hpp"

namespace pipebench::retrieval {
namespace {

using corpus::ChunkRecord;
using pipebench::testing::mock_gateway;
using pipebench::testing::prompts;
using pipebench::testing::rule;
using pipebench::testing::source_dir;

using Tokens = std::vector<std::string>;

ChunkRecord chunk(std::string id, std::string doc, std::int64_t pos, std::string text,
                  std::optional<std::string> sub = std::nullopt) {
  ChunkRecord c;
  c.id = std::move(id);
  c.doc_id = std::move(doc);
  c.position = pos;
  c.text = std::move(text);
  c.subdomain = std::move(sub);
  return c;
}

std::vector<ChunkRecord> fixture_chunks(const std::string& name) {
  return corpus::read_dataset<ChunkRecord>(source_dir() / "fixtures" / name).records;
}

// ---- BM25 ----

TEST(Bm25, NoSharedTermsScoresZero) {
  std::vector<Tokens> docs{{"a", "b"}, {"c", "d"}};
  auto stats = CorpusStats::build(docs);
  EXPECT_EQ(bm25_score(Tokens{"x", "y"}, docs[0], stats), 0.0);
}

TEST(Bm25, HandComputedSingleDocument) {
  // idf = ln(4/3); oled: tf 2 -> 2*2.2/3.2 counted twice, pixel: tf 1 -> 1.
  std::vector<Tokens> docs{{"oled", "pixel", "oled"}};
  auto stats = CorpusStats::build(docs);
  EXPECT_NEAR(bm25_score(docs[0], docs[0], stats), std::log(4.0 / 3.0) * 3.75, 1e-12);
  EXPECT_NEAR(bm25_score(docs[0], docs[0], stats), 1.0788077716941782, 1e-12);
}

TEST(Bm25, HandComputedLengthNormalisation) {
  std::vector<Tokens> docs{{"a", "b"}, {"a", "c", "c", "d"}, {"e"}};
  auto stats = CorpusStats::build(docs);
  EXPECT_EQ(stats.doc_count, 3u);
  EXPECT_NEAR(stats.avg_doc_len, 7.0 / 3.0, 1e-15);
  EXPECT_NEAR(stats.idf("c"), std::log(8.0 / 3.0), 1e-15);
  EXPECT_NEAR(bm25_score(Tokens{"c"}, docs[1], stats), 1.123031263671419, 1e-12);
}

TEST(Bm25, IdfNeverNegative) {
  std::vector<Tokens> docs{{"a"}, {"a"}, {"a"}};
  auto stats = CorpusStats::build(docs);
  EXPECT_GT(stats.idf("a"), 0.0);
  EXPECT_GT(stats.idf("unseen"), stats.idf("a"));
}

TEST(Bm25, NonDecreasingInTermFrequency) {
  std::vector<Tokens> docs;
  for (int tf = 1; tf <= 8; ++tf) {
    Tokens d(static_cast<std::size_t>(tf), "t");
    d.resize(8, "pad");
    docs.push_back(d);
  }
  docs.push_back({"other"});
  auto stats = CorpusStats::build(docs);
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < docs.size(); ++i) {
    double s = bm25_score(Tokens{"t"}, docs[i], stats);
    EXPECT_GE(s, prev);
    prev = s;
  }
}

TEST(Bm25, Preconditions) {
  std::vector<Tokens> none;
  EXPECT_THROW(CorpusStats::build(none), std::invalid_argument);
  EXPECT_THROW((Bm25Params{-0.1, 0.75}.validate()), std::invalid_argument);
  EXPECT_THROW((Bm25Params{1.2, 1.5}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((Bm25Params{}.validate()));
}

TEST(LexicalOverlap, Examples) {
  EXPECT_DOUBLE_EQ(lexical_overlap("x y z w", "x y z w"), 1.0);
  EXPECT_DOUBLE_EQ(lexical_overlap("x y z w", "p q r s"), 0.0);
  EXPECT_DOUBLE_EQ(lexical_overlap("x y z w", "x y q r"), 0.5);
  EXPECT_THROW(lexical_overlap("", "x"), std::invalid_argument);
  EXPECT_THROW(lexical_overlap("x", "  ,. "), std::invalid_argument);
}

// ---- BM25 negatives ----

// c0/c1 adjacent (overlap 0.9); c0/c2 two apart (overlap 0.7); c3 unrelated.
std::vector<ChunkRecord> mining_doc() {
  return {chunk("c0", "d", 0, "alpha beta gamma delta epsilon zeta eta theta iota kappa"),
          chunk("c1", "d", 1, "alpha beta gamma delta epsilon zeta eta theta iota lambda"),
          chunk("c2", "d", 2, "alpha beta gamma delta epsilon zeta eta mu nu xi"),
          chunk("c3", "d", 3, "omega psi chi phi upsilon")};
}

TEST(Bm25Negatives, AdjacentHighOverlapPairSkipped) {
  auto gw = mock_gateway({"judge"});
  StageCall judge{*gw, prompts(), "judge"};
  auto doc = mining_doc();
  auto r = mine_bm25_negatives(doc, 0.8, judge);
  EXPECT_TRUE(r.samples.empty());
}

TEST(Bm25Negatives, OverlapThresholdIsStrict) {
  auto gw = mock_gateway({"judge"});
  StageCall judge{*gw, prompts(), "judge"};
  auto doc = mining_doc();
  ASSERT_DOUBLE_EQ(lexical_overlap(doc[0].text, doc[2].text), 0.7);

  auto r = mine_bm25_negatives(doc, 0.69, judge);
  ASSERT_EQ(r.samples.size(), 1u);
  EXPECT_EQ(r.samples[0].anchor_id, "c0");
  EXPECT_EQ(r.samples[0].negative_id, "c2");
  EXPECT_EQ(r.samples[0].negative_kind, NegativeKind::bm25);
  EXPECT_DOUBLE_EQ(*r.samples[0].overlap, 0.7);
  EXPECT_GT(*r.samples[0].bm25, 0.0);

  EXPECT_TRUE(mine_bm25_negatives(doc, 0.7, judge).samples.empty());
  EXPECT_TRUE(mine_bm25_negatives(doc, 0.71, judge).samples.empty());
}

TEST(Bm25Negatives, RelevantVerdictAndJudgeFailure) {
  auto doc = mining_doc();
  {
    auto gw = mock_gateway({"judge"}, {rule("semantic_relevance", {}, "VERDICT: relevant")});
    StageCall judge{*gw, prompts(), "judge"};
    EXPECT_TRUE(mine_bm25_negatives(doc, 0.69, judge).samples.empty());
  }
  {
    auto gw = mock_gateway({"judge"}, {rule("semantic_relevance", {}, "maybe")});
    StageCall judge{*gw, prompts(), "judge"};
    auto r = mine_bm25_negatives(doc, 0.69, judge);
    EXPECT_TRUE(r.samples.empty());
    ASSERT_EQ(r.log.size(), 1u);
    EXPECT_NE(r.log[0].find("c0~c2"), std::string::npos);
  }
}

TEST(Bm25Negatives, EverySampleSatisfiesPredicates) {
  auto gw = mock_gateway({"judge"});
  StageCall judge{*gw, prompts(), "judge"};
  auto chunks = fixture_chunks("chunks.jsonl");
  for (double thr : {0.0, 0.1, 0.2}) {
    auto r = mine_bm25_negatives_corpus(chunks, thr, judge);
    std::map<std::string, const ChunkRecord*> by_id;
    for (const auto& c : chunks) by_id[c.id] = &c;
    for (const auto& s : r.samples) {
      const auto* a = by_id.at(s.anchor_id);
      const auto* b = by_id.at(s.negative_id);
      EXPECT_EQ(a->doc_id, b->doc_id);
      EXPECT_GE(std::llabs(a->position - b->position), 2);
      EXPECT_GT(lexical_overlap(a->text, b->text), thr);
      EXPECT_TRUE(validate_record(s).empty());
    }
  }
}

TEST(Bm25Negatives, Preconditions) {
  auto gw = mock_gateway({"judge"});
  StageCall judge{*gw, prompts(), "judge"};
  auto doc = mining_doc();
  doc.resize(2);
  EXPECT_THROW(mine_bm25_negatives(doc, 0.5, judge), std::invalid_argument);
  auto mixed = mining_doc();
  mixed[3].doc_id = "other";
  EXPECT_THROW(mine_bm25_negatives(mixed, 0.5, judge), std::invalid_argument);
}

// ---- cross-domain / adversarial ----

std::map<std::string, std::vector<ChunkRecord>> by_subdomain(const std::vector<ChunkRecord>& chunks) {
  std::map<std::string, std::vector<ChunkRecord>> out;
  for (const auto& c : chunks) out[*c.subdomain].push_back(c);
  return out;
}

TEST(CrossDomain, NeverReturnsSameSubdomain) {
  auto gw = mock_gateway({"emb"});
  auto chunks = fixture_chunks("chunks.jsonl");
  auto corpora = by_subdomain(chunks);
  for (const auto& q : chunks) {
    auto r = mine_cross_domain_negatives(q, corpora, *gw, "emb", 5);
    ASSERT_EQ(r.samples.size(), 5u);
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      const auto& s = r.samples[i];
      EXPECT_NE(s.extra.at("subdomain").get<std::string>(), *q.subdomain);
      EXPECT_NE(s.negative_id.rfind(*q.subdomain + "-", 0), 0u) << s.negative_id;
      if (i > 0) {
        EXPECT_GE(*r.samples[i - 1].similarity, *s.similarity);
      }
    }
  }
}

TEST(CrossDomain, EdgeCases) {
  auto gw = mock_gateway({"emb"});
  auto chunks = fixture_chunks("chunks.jsonl");
  auto corpora = by_subdomain(chunks);
  EXPECT_TRUE(mine_cross_domain_negatives(chunks[0], corpora, *gw, "emb", 0).samples.empty());
  EXPECT_EQ(mine_cross_domain_negatives(chunks[0], corpora, *gw, "emb", 1000).samples.size(), 24u);

  auto unlabeled = chunks[0];
  unlabeled.subdomain.reset();
  EXPECT_THROW(mine_cross_domain_negatives(unlabeled, corpora, *gw, "emb", 3), std::invalid_argument);
  std::map<std::string, std::vector<ChunkRecord>> one{{"oled", corpora["oled"]}};
  EXPECT_THROW(mine_cross_domain_negatives(chunks[0], one, *gw, "emb", 3), std::invalid_argument);
}

TEST(Adversarial, GeneratesKPerturbedVariants) {
  auto gw = mock_gateway({"para"});
  StageCall para{*gw, prompts(), "para"};
  auto c = fixture_chunks("chunks.jsonl")[0];
  auto r = gen_adversarial_negatives(c, para, 2);
  ASSERT_EQ(r.samples.size(), 2u);
  for (const auto& s : r.samples) {
    EXPECT_EQ(s.negative_kind, NegativeKind::adversarial);
    EXPECT_EQ(s.source_id, c.id);
    ASSERT_TRUE(s.negative_text);
    EXPECT_NE(*s.negative_text, c.text);
  }
  EXPECT_NE(r.samples[0].negative_id, r.samples[1].negative_id);
  EXPECT_THROW(gen_adversarial_negatives(c, para, 0), std::invalid_argument);
}

TEST(Adversarial, IdenticalParaphraseIsDropped) {
  auto c = chunk("p", "d", 0, "plain text here");
  auto gw = mock_gateway({"para"}, {rule("paraphrase", {}, "PARAPHRASE: plain text here")});
  StageCall para{*gw, prompts(), "para"};
  auto r = gen_adversarial_negatives(c, para, 3);
  EXPECT_TRUE(r.samples.empty());
  EXPECT_EQ(r.log.size(), 1u);
}

// ---- loss-based selection ----

std::vector<LossEntry> losses(std::vector<double> values, std::int64_t step = 1000) {
  std::vector<LossEntry> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back({"s" + std::to_string(i), step, values[i], nlohmann::json::object()});
  }
  return out;
}

TEST(SelectHard, TopFractionByLoss) {
  auto r = losses({0.1, 0.9, 0.3, 0.8, 0.2, 0.4, 0.5, 0.6, 0.05, 0.7});
  EXPECT_EQ(select_hard_negatives_by_loss(r, 1000, 0.2), (std::vector<std::string>{"s1", "s3"}));
  EXPECT_EQ(select_hard_negatives_by_loss(r, 500, 0.1), (std::vector<std::string>{"s1"}));
  EXPECT_EQ(select_hard_negatives_by_loss(r, 1000, 1.0).size(), 10u);
  EXPECT_TRUE(select_hard_negatives_by_loss(r, 1000, 0.05).empty());
}

TEST(SelectHard, TiesBrokenById) {
  auto r = losses({1.0, 1.0, 1.0, 1.0, 1.0});
  EXPECT_EQ(select_hard_negatives_by_loss(r, 1000, 0.4), (std::vector<std::string>{"s0", "s1"}));
}

TEST(SelectHard, StepMustBeOnSchedule) {
  EXPECT_THROW(select_hard_negatives_by_loss(losses({1, 2}, 1500), 1000, 0.5), std::invalid_argument);
  EXPECT_THROW(select_hard_negatives_by_loss(losses({1, 2}, 0), 1000, 0.5), std::invalid_argument);
  auto mixed = losses({1, 2});
  mixed[1].step = 2000;
  EXPECT_THROW(select_hard_negatives_by_loss(mixed, 1000, 0.5), std::invalid_argument);
  EXPECT_THROW(select_hard_negatives_by_loss(losses({1}), 0, 0.5), std::invalid_argument);
  EXPECT_THROW(select_hard_negatives_by_loss(losses({1}), 1000, 0.0), std::invalid_argument);
  EXPECT_THROW(select_hard_negatives_by_loss(losses({1}), 1000, 1.5), std::invalid_argument);
}

// ---- iterative retrieval ----

TEST(Iterative, StopsWhenCoverageComplete) {
  auto gw = mock_gateway({"emb", "analyst"});
  auto index = ChunkIndex::build(fixture_chunks("chunks.jsonl"), *gw, "emb");
  StageCall analyst{*gw, prompts(), "analyst"};
  auto r = iterative_retrieve("Why do blue OLED emitters age?", index, analyst, {3, 4, 0.0, std::nullopt});
  ASSERT_EQ(r.trace.iterations.size(), 1u);
  EXPECT_EQ(r.trace.stop, StopReason::coverage);
  EXPECT_EQ(r.chunks.size(), 4u);
}

TEST(Iterative, BoundedByMaxIterations) {
  auto gw = mock_gateway({"emb", "analyst"},
                         {rule("coverage_analysis", {{"round", "1"}}, "COVERAGE: incomplete\nQUERY: quantum dot color"),
                          rule("coverage_analysis", {{"round", "2"}}, "COVERAGE: incomplete\nQUERY: thin film transistor"),
                          rule("coverage_analysis", {{"round", "3"}}, "COVERAGE: incomplete\nQUERY: microled transfer"),
                          rule("coverage_analysis", {}, "COVERAGE: incomplete\nQUERY: liquid crystal")});
  auto index = ChunkIndex::build(fixture_chunks("chunks.jsonl"), *gw, "emb");
  StageCall analyst{*gw, prompts(), "analyst"};
  for (int max_it : {1, 2, 3}) {
    auto r = iterative_retrieve("Why do blue OLED emitters age?", index, analyst, {max_it, 2, 0.0, "emb"});
    EXPECT_EQ(static_cast<int>(r.trace.iterations.size()), max_it);
    EXPECT_EQ(r.trace.stop, StopReason::max_iterations);
    std::set<std::string> ids;
    for (const auto& c : r.chunks) EXPECT_TRUE(ids.insert(c.id).second) << "duplicate " << c.id;
    for (std::size_t i = 0; i < r.trace.iterations.size(); ++i) EXPECT_EQ(r.trace.iterations[i].round, int(i) + 1);
    EXPECT_EQ(to_json(r.trace)["iterations"].size(), static_cast<std::size_t>(max_it));
  }
}

TEST(Iterative, SecondHopFoundOnlyThroughSupplementaryQuery) {
  auto chunks = fixture_chunks("multihop_chunks.jsonl");
  auto queries = corpus::read_dataset<corpus::QuestionRecord>(source_dir() / "fixtures" / "queries.jsonl").records;
  const std::string q = queries.at(0).text;
  const ChunkRecord* hop2 = nullptr;
  for (const auto& c : chunks) {
    if (c.id == "hop-02") hop2 = &c;
  }
  ASSERT_NE(hop2, nullptr);
  auto qw = text::words(q);
  for (const auto& w : text::words(hop2->text)) {
    EXPECT_EQ(std::count(qw.begin(), qw.end(), w), 0) << "shared term " << w;
  }

  auto gw = mock_gateway({"emb", "analyst"},
                         gateway::load_mock_rules(source_dir() / "fixtures" / "mock_rules.json"));
  auto index = ChunkIndex::build(chunks, *gw, "emb");
  StageCall analyst{*gw, prompts(), "analyst"};
  auto has_hop2 = [](const IterativeResult& r) {
    return std::any_of(r.chunks.begin(), r.chunks.end(), [](const auto& c) { return c.id == "hop-02"; });
  };

  auto baseline = iterative_retrieve(q, index, analyst, {1, 1, 0.0, std::nullopt});
  EXPECT_FALSE(has_hop2(baseline));

  auto full = iterative_retrieve(q, index, analyst, {3, 1, 0.0, std::nullopt});
  EXPECT_TRUE(has_hop2(full));
  ASSERT_GE(full.trace.iterations.size(), 2u);
  EXPECT_EQ(full.trace.iterations[0].supplementary_queries, (std::vector<std::string>{"Aurora specifies which layers?"}));
  EXPECT_EQ(full.trace.stop, StopReason::coverage);
}

TEST(Iterative, Preconditions) {
  auto gw = mock_gateway({"emb", "analyst"});
  auto index = ChunkIndex::build(fixture_chunks("chunks.jsonl"), *gw, "emb");
  StageCall analyst{*gw, prompts(), "analyst"};
  EXPECT_THROW(iterative_retrieve("q", index, analyst, {0, 4, 0.0, std::nullopt}), std::invalid_argument);
  EXPECT_THROW(iterative_retrieve("  ", index, analyst, {3, 4, 0.0, std::nullopt}), std::invalid_argument);
}

TEST(ChunkIndexTest, SearchOrderAndThreshold) {
  auto gw = mock_gateway({"emb"});
  auto index = ChunkIndex::build(fixture_chunks("chunks.jsonl"), *gw, "emb", 7);
  auto hits = index.search(index.chunks()[3].text, 5);
  ASSERT_EQ(hits.size(), 5u);
  EXPECT_EQ(hits[0].index, 3u);
  EXPECT_NEAR(hits[0].score, 1.0, 1e-9);
  for (std::size_t i = 1; i < hits.size(); ++i) EXPECT_GE(hits[i - 1].score, hits[i].score);
  for (const auto& h : index.search(index.chunks()[3].text, 30, 0.2)) EXPECT_GT(h.score, 0.2);
}

// ---- RAG-SFT ----

std::vector<ChunkRecord> article() {
  const std::vector<std::string> vocab{"cathode", "barrier", "lamination", "polarizer", "substrate", "bonding",
                                       "inspection", "yield", "annealing", "cleaning", "etching", "coating",
                                       "cutting", "aging", "sealing", "driver", "backplane", "testing"};
  std::vector<ChunkRecord> out;
  for (int i = 0; i < 12; ++i) {
    std::string t = "Step " + std::to_string(i) + " covers";
    for (int w = 0; w < 4 + i % 5; ++w) t += " " + vocab[static_cast<std::size_t>((i * 3 + w) % vocab.size())];
    out.push_back(chunk("art-" + std::to_string(100 + i), "art", i, t + "."));
  }
  return out;
}

TEST(RagSft, RecordShape) {
  auto gw = mock_gateway({"gen", "rr"});
  auto art = article();
  auto corpus = fixture_chunks("chunks.jsonl");
  auto rec = build_ragsft_record(art, corpus, *gw, prompts(), {"gen", "rr"}, 7, "rs-1");
  EXPECT_EQ(rec.chunks.size(), kOracleChunks + kRandomChunks);
  EXPECT_EQ(rec.oracle_ids.size(), 5u);
  EXPECT_EQ(rec.random_ids.size(), 3u);
  EXPECT_EQ(rec.topics.size(), 5u);
  EXPECT_EQ(rec.stages.size(), kRagSftStages.size());
  EXPECT_FALSE(rec.query.empty());
  EXPECT_FALSE(rec.answer.empty());
  int oracle = 0, random = 0;
  for (const auto& c : rec.chunks) {
    if (c.chunk_kind == corpus::ChunkKind::oracle) {
      ++oracle;
      EXPECT_EQ(c.doc_id, "art");
    }
    if (c.chunk_kind == corpus::ChunkKind::random) {
      ++random;
      EXPECT_EQ(std::count(rec.oracle_ids.begin(), rec.oracle_ids.end(), c.id), 0);
    }
  }
  EXPECT_EQ(oracle, 5);
  EXPECT_EQ(random, 3);
  EXPECT_TRUE(validate_record(rec).empty());
}

TEST(RagSft, DeterministicBytes) {
  auto art = article();
  auto corpus = fixture_chunks("chunks.jsonl");
  auto gw1 = mock_gateway({"gen", "rr"});
  auto gw2 = mock_gateway({"gen", "rr"});
  auto a = build_ragsft_record(art, corpus, *gw1, prompts(), {"gen", "rr"}, 11, "rs");
  auto b = build_ragsft_record(art, corpus, *gw2, prompts(), {"gen", "rr"}, 11, "rs");
  EXPECT_EQ(corpus::encode_line(a), corpus::encode_line(b));
  auto back = corpus::decode_line<RagSftRecord>(corpus::encode_line(a));
  EXPECT_EQ(corpus::encode_line(back), corpus::encode_line(a));
}

TEST(RagSft, TooFewRandomCandidates) {
  auto gw = mock_gateway({"gen", "rr"});
  auto art = article();
  auto full = build_ragsft_record(art, art, *gw, prompts(), {"gen", "rr"}, 3, "rs");
  std::vector<ChunkRecord> small;
  int others = 0;
  for (const auto& c : art) {
    bool is_oracle = std::count(full.oracle_ids.begin(), full.oracle_ids.end(), c.id) > 0;
    if (is_oracle || others++ < 2) small.push_back(c);
  }
  EXPECT_THROW(build_ragsft_record(art, small, *gw, prompts(), {"gen", "rr"}, 3, "rs"), std::invalid_argument);
  auto tiny = art;
  tiny.resize(4);
  EXPECT_THROW(build_ragsft_record(tiny, art, *gw, prompts(), {"gen", "rr"}, 3, "rs"), std::invalid_argument);
}

TEST(RagSft, StageFailureNamesStage) {
  auto art = article();
  {
    auto gw = mock_gateway({"gen", "rr"}, {rule("topic_extraction", {}, "TOPIC: only one")});
    try {
      build_ragsft_record(art, art, *gw, prompts(), {"gen", "rr"}, 1, "rs");
      FAIL() << "expected RagSftError";
    } catch (const RagSftError& e) {
      EXPECT_EQ(e.stage(), "topic_extraction");
    }
  }
  {
    auto gw = mock_gateway({"gen", "rr"}, {rule("answer_generation", {}, "no answer here")});
    try {
      build_ragsft_record(art, art, *gw, prompts(), {"gen", "rr"}, 1, "rs");
      FAIL() << "expected RagSftError";
    } catch (const RagSftError& e) {
      EXPECT_EQ(e.stage(), "answer_generation");
    }
  }
}

}  // namespace
}  // namespace pipebench::retrieval

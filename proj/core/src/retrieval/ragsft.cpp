// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/retrieval/ragsft.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pipebench/common/rng.hpp"
#include "pipebench/common/text.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::retrieval {

using nlohmann::json;
namespace reply = gateway::reply;
namespace tasks = gateway::tasks;

void to_json(json& j, const RagSftRecord& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["query"] = r.query;
  j["chunks"] = json::array();
  for (const auto& c : r.chunks) j["chunks"].push_back(c);
  j["oracle_ids"] = r.oracle_ids;
  j["random_ids"] = r.random_ids;
  j["answer"] = r.answer;
  j["topics"] = r.topics;
  j["prompt_id"] = r.prompt_id;
  j["seed"] = r.seed;
  j["stages"] = r.stages;
}

void from_json(const json& j, RagSftRecord& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.query = f.text("query");
  r.chunks = f.raw("chunks").get<std::vector<corpus::ChunkRecord>>();
  r.oracle_ids = f.raw("oracle_ids").get<std::vector<std::string>>();
  r.random_ids = f.raw("random_ids").get<std::vector<std::string>>();
  r.answer = f.text("answer");
  r.topics = f.raw("topics").get<std::vector<std::string>>();
  r.prompt_id = f.text("prompt_id");
  r.seed = f.raw("seed").get<std::uint64_t>();
  r.stages = f.raw("stages").get<std::vector<std::string>>();
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const RagSftRecord& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  corpus::require_text(v, "query", r.query);
  corpus::require_text(v, "answer", r.answer);
  if (r.chunks.size() != kOracleChunks + kRandomChunks) v.push_back({"chunks", "must hold exactly 8 chunks"});
  if (r.oracle_ids.size() != kOracleChunks) v.push_back({"oracle_ids", "must hold exactly 5 ids"});
  if (r.random_ids.size() != kRandomChunks) v.push_back({"random_ids", "must hold exactly 3 ids"});
  if (r.topics.size() != kTopics) v.push_back({"topics", "must hold exactly 5 topics"});
  std::set<std::string> expected(r.oracle_ids.begin(), r.oracle_ids.end());
  expected.insert(r.random_ids.begin(), r.random_ids.end());
  std::set<std::string> got;
  for (const auto& c : r.chunks) {
    got.insert(c.id);
    const bool oracle = std::find(r.oracle_ids.begin(), r.oracle_ids.end(), c.id) != r.oracle_ids.end();
    if (c.chunk_kind != (oracle ? corpus::ChunkKind::oracle : corpus::ChunkKind::random)) {
      v.push_back({"chunks", "chunk " + c.id + " has the wrong kind"});
    }
  }
  if (got != expected || expected.size() != kOracleChunks + kRandomChunks) {
    v.push_back({"chunks", "oracle and random ids must partition the chunks"});
  }
  return v;
}

namespace {

std::string generate(gateway::Gateway& gw, const gateway::PromptLibrary& prompts, const RagSftProfiles& p,
                     std::string_view stage, std::string_view task, std::map<std::string, std::string> vars,
                     std::uint64_t seed) {
  try {
    auto req = prompts.render(task, std::move(vars), p.temperature, static_cast<std::int64_t>(seed & 0x7fffffff));
    return gw.generate(req, p.generator).text;
  } catch (const RagSftError&) {
    throw;
  } catch (const std::exception& e) {
    throw RagSftError(std::string(stage), e.what());
  }
}

}  // namespace

RagSftRecord build_ragsft_record(std::span<const corpus::ChunkRecord> article, std::span<const corpus::ChunkRecord> corpus,
                                 gateway::Gateway& gw, const gateway::PromptLibrary& prompts,
                                 const RagSftProfiles& profiles, std::uint64_t seed, std::string record_id) {
  RagSftRecord rec;
  rec.id = std::move(record_id);
  rec.seed = seed;

  // (1) chunk abstraction: the article's usable chunks in reading order.
  std::vector<corpus::ChunkRecord> chunks;
  for (const auto& c : article) {
    if (!text::is_blank(c.text)) chunks.push_back(c);
  }
  std::sort(chunks.begin(), chunks.end(), [](const auto& a, const auto& b) {
    return a.position != b.position ? a.position < b.position : a.id < b.id;
  });
  if (chunks.size() < kOracleChunks) {
    throw std::invalid_argument("build_ragsft_record: article has fewer than 5 usable chunks");
  }
  rec.stages.emplace_back(kRagSftStages[0]);

  // (2) topics and oracle chunks.
  std::map<std::string, std::string> vars;
  std::string ids, block;
  for (const auto& c : chunks) {
    ids += (ids.empty() ? "" : ", ") + c.id;
    vars["chunk:" + c.id] = c.text;
    block += "[" + c.id + "] " + c.text + "\n";
  }
  vars["chunk_ids"] = ids;
  vars["chunks"] = block;
  const std::string topic_reply = generate(gw, prompts, profiles, kRagSftStages[1], tasks::kTopicExtraction, vars, seed);
  std::map<std::string, const corpus::ChunkRecord*> by_id;
  for (const auto& c : chunks) by_id[c.id] = &c;
  auto oracle_field = reply::field(topic_reply, "ORACLE");
  if (!oracle_field) throw RagSftError(std::string(kRagSftStages[1]), "no ORACLE line");
  for (auto& id : reply::split_list(*oracle_field)) {
    if (!by_id.contains(id)) throw RagSftError(std::string(kRagSftStages[1]), "oracle id '" + id + "' not in article");
    if (std::find(rec.oracle_ids.begin(), rec.oracle_ids.end(), id) != rec.oracle_ids.end()) {
      throw RagSftError(std::string(kRagSftStages[1]), "oracle id '" + id + "' repeated");
    }
    rec.oracle_ids.push_back(id);
  }
  if (rec.oracle_ids.size() != kOracleChunks) throw RagSftError(std::string(kRagSftStages[1]), "need exactly 5 oracle ids");
  for (auto& t : reply::fields(topic_reply, "TOPIC")) {
    t = text::trim(t);
    if (!t.empty()) rec.topics.push_back(t);
  }
  if (rec.topics.size() != kTopics) throw RagSftError(std::string(kRagSftStages[1]), "need exactly 5 topics");
  rec.stages.emplace_back(kRagSftStages[1]);

  // (3) query generation.
  std::map<std::string, std::string> qvars;
  std::string topics;
  for (const auto& t : rec.topics) topics += (topics.empty() ? "" : ", ") + t;
  qvars["topics"] = topics;
  std::string qblock;
  for (std::size_t i = 0; i < rec.oracle_ids.size(); ++i) {
    qvars["chunk_" + std::to_string(i + 1)] = by_id[rec.oracle_ids[i]]->text;
    qblock += "[" + std::to_string(i + 1) + "] " + by_id[rec.oracle_ids[i]]->text + "\n";
  }
  qvars["chunks"] = qblock;
  auto query = reply::tail(generate(gw, prompts, profiles, kRagSftStages[2], tasks::kQueryGeneration, qvars, seed), "QUERY");
  if (!query || text::is_blank(*query)) throw RagSftError(std::string(kRagSftStages[2]), "no QUERY in output");
  rec.query = text::trim(*query);
  rec.stages.emplace_back(kRagSftStages[2]);

  // (4) blend 5 oracle + 3 random, rerank.
  std::set<std::string> oracle_set(rec.oracle_ids.begin(), rec.oracle_ids.end());
  std::vector<const corpus::ChunkRecord*> pool;
  std::set<std::string> pool_ids;
  for (const auto& c : corpus) {
    if (!oracle_set.contains(c.id) && !text::is_blank(c.text) && pool_ids.insert(c.id).second) pool.push_back(&c);
  }
  if (pool.size() < kRandomChunks) {
    throw std::invalid_argument("build_ragsft_record: corpus has fewer than 3 non-oracle chunks");
  }
  std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->id < b->id; });
  DeterministicRng rng(seed);
  rng.shuffle(std::span(pool));
  std::vector<corpus::ChunkRecord> blend;
  for (const auto& id : rec.oracle_ids) {
    blend.push_back(*by_id[id]);
    blend.back().chunk_kind = corpus::ChunkKind::oracle;
  }
  for (std::size_t i = 0; i < kRandomChunks; ++i) {
    blend.push_back(*pool[i]);
    blend.back().chunk_kind = corpus::ChunkKind::random;
    rec.random_ids.push_back(pool[i]->id);
  }
  rng.shuffle(std::span(blend));
  gateway::RerankResult ranked;
  try {
    ranked = gw.rerank(rec.query, blend, profiles.reranker);
  } catch (const std::exception& e) {
    throw RagSftError(std::string(kRagSftStages[3]), e.what());
  }
  for (const auto& e : ranked.entries) {
    for (const auto& c : blend) {
      if (c.id == e.chunk_id) {
        rec.chunks.push_back(c);
        rec.chunks.back().extra["rerank_score"] = e.score;
        break;
      }
    }
  }
  rec.stages.emplace_back(kRagSftStages[3]);

  // (5) answer from the query and the reranked chunks.
  std::map<std::string, std::string> avars{{"query", rec.query}, {"chunk_count", std::to_string(rec.chunks.size())}};
  std::string ablock;
  for (std::size_t i = 0; i < rec.chunks.size(); ++i) {
    avars["chunk_" + std::to_string(i + 1)] = rec.chunks[i].text;
    ablock += "[" + std::to_string(i + 1) + "] " + rec.chunks[i].text + "\n";
  }
  avars["chunks"] = ablock;
  auto answer = reply::tail(generate(gw, prompts, profiles, kRagSftStages[4], tasks::kAnswerGeneration, avars, seed), "ANSWER");
  if (!answer || text::is_blank(*answer)) throw RagSftError(std::string(kRagSftStages[4]), "no ANSWER in output");
  rec.answer = text::trim(*answer);
  rec.prompt_id = std::string(tasks::kAnswerGeneration);
  rec.stages.emplace_back(kRagSftStages[4]);

  // (6) synthesis.
  if (auto v = validate_record(rec); !v.empty()) {
    throw RagSftError(std::string(kRagSftStages[5]), v.front().field + ": " + v.front().message);
  }
  rec.stages.emplace_back(kRagSftStages[5]);
  return rec;
}

}  // namespace pipebench::retrieval

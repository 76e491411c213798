// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/retrieval/iterative.hpp"

#include <set>
#include <stdexcept>

#include "pipebench/common/text.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::retrieval {

namespace reply = gateway::reply;

nlohmann::json to_json(const RetrievalTrace& t) {
  nlohmann::json j;
  j["stop_reason"] = t.stop == StopReason::coverage ? "coverage" : "max_iterations";
  j["iterations"] = nlohmann::json::array();
  for (const auto& it : t.iterations) {
    j["iterations"].push_back({{"round", it.round},
                               {"queries", it.queries},
                               {"retrieved_ids", it.retrieved_ids},
                               {"analysis", it.analysis},
                               {"supplementary_queries", it.supplementary_queries}});
  }
  return j;
}

IterativeResult iterative_retrieve(const std::string& query, const ChunkIndex& index, const curation::StageCall& analyst,
                                   const IterativeParams& params) {
  if (params.max_iterations < 1) throw std::invalid_argument("iterative_retrieve: max_iterations must be >= 1");
  if (text::is_blank(query)) throw std::invalid_argument("iterative_retrieve: empty query");

  IterativeResult out;
  std::set<std::string> have;
  std::set<std::string> issued;
  std::vector<std::string> queries{query};
  for (int round = 1; round <= params.max_iterations; ++round) {
    IterationTrace it;
    it.round = round;
    it.queries = queries;
    for (const auto& q : queries) issued.insert(q);

    for (const auto& q : queries) {
      auto hits = index.search(q, params.per_round_k, params.min_similarity);
      std::vector<const corpus::ChunkRecord*> found;
      for (const auto& h : hits) found.push_back(&index.chunks()[h.index]);
      if (params.rerank_profile && !found.empty()) {
        std::vector<corpus::ChunkRecord> batch;
        for (auto* c : found) batch.push_back(*c);
        auto ranked = index.gateway().rerank(q, batch, *params.rerank_profile);
        std::vector<const corpus::ChunkRecord*> reordered;
        for (const auto& e : ranked.entries) {
          for (auto* c : found) {
            if (c->id == e.chunk_id) {
              reordered.push_back(c);
              break;
            }
          }
        }
        found = std::move(reordered);
      }
      for (auto* c : found) {
        it.retrieved_ids.push_back(c->id);
        if (have.insert(c->id).second) out.chunks.push_back(*c);
      }
    }

    std::string issued_list;
    for (const auto& q : it.queries) issued_list += "- " + q + "\n";
    std::string context;
    for (const auto& c : out.chunks) context += "[" + c.id + "] " + c.text + "\n";
    auto req = analyst.prompts.render(gateway::tasks::kCoverageAnalysis,
                                      {{"query", query},
                                       {"round", std::to_string(round)},
                                       {"queries", issued_list},
                                       {"context", context}},
                                      analyst.temperature);
    std::optional<std::string> verdict;
    try {
      it.analysis = analyst.gw.generate(req, analyst.profile).text;
      verdict = reply::field(it.analysis, "COVERAGE");
    } catch (const std::exception& e) {
      it.analysis = std::string("analysis failed: ") + e.what();
    }
    const std::string v = verdict ? reply::lower(*verdict) : "";
    if (v == "complete") {
      out.trace.stop = StopReason::coverage;
      out.trace.iterations.push_back(std::move(it));
      break;
    }
    if (v == "incomplete") {
      for (auto& q : reply::fields(it.analysis, "QUERY")) {
        q = text::trim(q);
        if (!q.empty() && !issued.contains(q)) it.supplementary_queries.push_back(q);
      }
    }
    out.trace.stop = StopReason::max_iterations;
    queries = it.supplementary_queries;
    out.trace.iterations.push_back(std::move(it));
    if (queries.empty()) break;  // no way to make progress
  }
  return out;
}

}  // namespace pipebench::retrieval

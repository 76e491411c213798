// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pipebench/curation/llm_stages.hpp"
#include "pipebench/retrieval/index.hpp"

namespace pipebench::retrieval {

enum class StopReason { coverage, max_iterations };

struct IterationTrace {
  int round = 1;
  std::vector<std::string> queries;
  std::vector<std::string> retrieved_ids;  // reranked, per query in issue order
  std::string analysis;                    // raw analyst reply
  std::vector<std::string> supplementary_queries;
};

struct RetrievalTrace {
  std::vector<IterationTrace> iterations;
  StopReason stop = StopReason::max_iterations;
};

nlohmann::json to_json(const RetrievalTrace& t);

struct IterativeParams {
  int max_iterations = 3;
  std::size_t per_round_k = 4;
  double min_similarity = 0.0;
  std::optional<std::string> rerank_profile;  // skip reranking when empty
};

struct IterativeResult {
  std::vector<corpus::ChunkRecord> chunks;  // deduplicated union, first-seen order
  RetrievalTrace trace;
};

/// Round 1 retrieves on the user query; the analyst then either declares
/// coverage complete or supplies supplementary queries for the next round.
/// An unparseable analysis, or "incomplete" without queries, ends the loop
/// with max_iterations semantics.
IterativeResult iterative_retrieve(const std::string& query, const ChunkIndex& index, const curation::StageCall& analyst,
                                   const IterativeParams& params);

}  // namespace pipebench::retrieval

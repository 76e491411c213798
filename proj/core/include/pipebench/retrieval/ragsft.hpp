// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/gateway/gateway.hpp"
#include "pipebench/gateway/prompts.hpp"

namespace pipebench::retrieval {

inline constexpr std::size_t kOracleChunks = 5;
inline constexpr std::size_t kRandomChunks = 3;
inline constexpr std::size_t kTopics = 5;

/// Stage tags, in execution order.
inline constexpr std::array<std::string_view, 6> kRagSftStages{
    "chunk_abstraction", "topic_extraction", "query_generation", "chunk_blending", "answer_generation", "synthesis"};

struct RagSftRecord {
  static constexpr std::string_view kind = "ragsft";

  std::string id;
  std::string query;
  std::vector<corpus::ChunkRecord> chunks;  // reranked, chunk_kind oracle/random
  std::vector<std::string> oracle_ids;
  std::vector<std::string> random_ids;
  std::string answer;
  std::vector<std::string> topics;
  std::string prompt_id;
  std::uint64_t seed = 0;
  std::vector<std::string> stages;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const RagSftRecord&) const = default;
};

void to_json(nlohmann::json& j, const RagSftRecord& r);
void from_json(const nlohmann::json& j, RagSftRecord& r);
std::vector<corpus::Violation> validate_record(const RagSftRecord& r);

/// A model stage failed; `stage()` names it.
class RagSftError : public std::runtime_error {
 public:
  RagSftError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RagSftProfiles {
  std::string generator;
  std::string reranker;
  double temperature = 0.0;
};

/// Six stages: chunk abstraction, topic/oracle extraction, query generation,
/// 5 oracle + 3 seeded-random blend reranked to 8, answer generation,
/// synthesis. Random chunks come from `corpus` minus the oracle chunks.
/// Throws std::invalid_argument when the article or the random pool is too
/// small, RagSftError when a model stage fails.
RagSftRecord build_ragsft_record(std::span<const corpus::ChunkRecord> article, std::span<const corpus::ChunkRecord> corpus,
                                 gateway::Gateway& gw, const gateway::PromptLibrary& prompts,
                                 const RagSftProfiles& profiles, std::uint64_t seed, std::string record_id);

}  // namespace pipebench::retrieval

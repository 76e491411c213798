// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/gateway/gateway.hpp"

namespace pipebench::retrieval {

struct Hit {
  std::size_t index = 0;  // into ChunkIndex::chunks()
  double score = 0.0;
};

/// Exact cosine search over embedded chunks held in memory.
class ChunkIndex {
 public:
  static ChunkIndex build(std::vector<corpus::ChunkRecord> chunks, gateway::Gateway& gw, std::string embed_profile,
                          std::size_t batch_size = 64);

  /// Top k hits with cosine > min_similarity, best first, ties by chunk id.
  std::vector<Hit> search(const std::string& query, std::size_t k, double min_similarity = 0.0) const;
  std::vector<Hit> search(const gateway::EmbeddingVec& query, std::size_t k, double min_similarity = 0.0) const;

  const std::vector<corpus::ChunkRecord>& chunks() const { return chunks_; }
  const gateway::EmbeddingVec& vector(std::size_t i) const { return vectors_[i]; }
  gateway::Gateway& gateway() const { return *gw_; }
  const std::string& embed_profile() const { return profile_; }

 private:
  std::vector<corpus::ChunkRecord> chunks_;
  std::vector<gateway::EmbeddingVec> vectors_;
  gateway::Gateway* gw_ = nullptr;
  std::string profile_;
};

}  // namespace pipebench::retrieval

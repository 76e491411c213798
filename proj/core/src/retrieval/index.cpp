// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/retrieval/index.hpp"

#include <algorithm>

namespace pipebench::retrieval {

ChunkIndex ChunkIndex::build(std::vector<corpus::ChunkRecord> chunks, gateway::Gateway& gw, std::string embed_profile,
                             std::size_t batch_size) {
  if (batch_size == 0) batch_size = 1;
  ChunkIndex ix;
  ix.gw_ = &gw;
  ix.profile_ = std::move(embed_profile);
  for (std::size_t start = 0; start < chunks.size(); start += batch_size) {
    std::vector<std::string> texts;
    for (std::size_t i = start; i < std::min(chunks.size(), start + batch_size); ++i) texts.push_back(chunks[i].text);
    for (auto& v : gw.embed(texts, ix.profile_)) ix.vectors_.push_back(std::move(v));
  }
  ix.chunks_ = std::move(chunks);
  return ix;
}

std::vector<Hit> ChunkIndex::search(const std::string& query, std::size_t k, double min_similarity) const {
  auto v = gw_->embed({query}, profile_);
  return search(v.front(), k, min_similarity);
}

std::vector<Hit> ChunkIndex::search(const gateway::EmbeddingVec& query, std::size_t k, double min_similarity) const {
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < chunks_.size(); ++i) {
    const double c = gateway::cosine(query, vectors_[i]);
    if (c > min_similarity) hits.push_back({i, c});
  }
  std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return chunks_[a.index].id < chunks_[b.index].id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

}  // namespace pipebench::retrieval

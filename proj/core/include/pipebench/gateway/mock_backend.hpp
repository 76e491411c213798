// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pipebench/gateway/gateway.hpp"

namespace pipebench::gateway {

/// A scripted response. A rule matches when its task equals the request task
/// (empty matches any), every `when` entry is a substring of the named
/// request var, and `prompt_contains` occurs in some message. The first
/// matching rule wins.
struct MockRule {
  std::string task;
  std::map<std::string, std::string> when;
  std::string prompt_contains;
  // One is picked by request seed (seed mod size); `{{var}}` placeholders
  // are filled from the request vars.
  std::vector<std::string> outputs;
  std::optional<GatewayErrc> error;  // fail instead of answering
};

std::vector<MockRule> mock_rules_from_json(const nlohmann::json& j);
std::vector<MockRule> load_mock_rules(const std::filesystem::path& path);

/// Deterministic offline backend: a pure function of (operation, inputs,
/// seed). Requests that match no rule fall through to built-in per-task
/// behaviour (sentence-splitting extractor, containment judge, identity
/// consolidator, lexical-overlap rankers, ...) and finally to a hash-derived
/// string.
class MockBackend : public Backend {
 public:
  explicit MockBackend(std::vector<MockRule> rules = {}, int embedding_dims = 1024, std::string model = "mock");

  Generation generate(const GenerationRequest& request) override;
  std::vector<EmbeddingVec> embed(const std::vector<std::string>& texts) override;
  RerankResult rerank(const std::string& query, const std::vector<corpus::ChunkRecord>& chunks) override;

  /// Signed feature hashing of the word multiset into `dims` buckets, unit
  /// normalized. Texts with disjoint vocabularies are orthogonal unless two
  /// of their words share a bucket.
  static EmbeddingVec embed_text(std::string_view text, int dims);

 private:
  std::optional<std::string> builtin(const GenerationRequest& request) const;

  std::vector<MockRule> rules_;
  int dims_;
  std::string model_;
};

}  // namespace pipebench::gateway

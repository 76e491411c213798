// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "pipebench/gateway/gateway.hpp"

namespace pipebench::gateway {

/// Chat-completion style HTTP backend:
///   POST {endpoint}/chat/completions  {model, messages, temperature, seed?, max_tokens}
///   POST {endpoint}/embeddings        {model, input: [...]}
///   POST {endpoint}/rerank            {model, query, documents: [...]}
/// The bearer token is read from the environment variable named in the
/// profile on every call, so rotating credentials needs no restart.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendProfile profile);

  Generation generate(const GenerationRequest& request) override;
  std::vector<EmbeddingVec> embed(const std::vector<std::string>& texts) override;
  RerankResult rerank(const std::string& query, const std::vector<corpus::ChunkRecord>& chunks) override;

  /// Request bodies, exposed so retries can be shown to resend identical bytes.
  static nlohmann::json chat_body(const BackendProfile& profile, const GenerationRequest& request);

 private:
  nlohmann::json post(const std::string& path, const std::string& body);

  BackendProfile profile_;
  std::string origin_;     // scheme://host[:port]
  std::string base_path_;  // path prefix of the endpoint
};

}  // namespace pipebench::gateway

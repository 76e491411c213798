// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pipebench::gateway {

struct Message {
  std::string role;
  std::string text;

  bool operator==(const Message&) const = default;
};

/// One chat-generation call. `task` and `vars` identify the prompt template
/// and the values it was rendered from; HTTP backends send only `messages`,
/// the mock backend dispatches on `task`/`vars`.
struct GenerationRequest {
  std::string task;
  std::map<std::string, std::string> vars;
  std::vector<Message> messages;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  int max_output = 2048;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct Generation {
  std::string text;
  Usage usage;
  int attempts = 1;
};

struct EmbeddingVec {
  std::vector<double> values;

  std::size_t dims() const { return values.size(); }
  bool operator==(const EmbeddingVec&) const = default;
};

/// Cosine similarity; 0 when either vector has zero norm.
double cosine(const EmbeddingVec& a, const EmbeddingVec& b);

struct RerankEntry {
  std::string chunk_id;
  double score = 0.0;

  bool operator==(const RerankEntry&) const = default;
};

/// Sorted by score descending, one entry per input chunk.
struct RerankResult {
  std::vector<RerankEntry> entries;
};

struct RetryPolicy {
  int count = 0;
  std::chrono::milliseconds backoff{0};
};

enum class BackendKind { mock, http };

struct BackendProfile {
  std::string name;
  BackendKind backend = BackendKind::mock;
  std::string endpoint;
  std::string model;
  std::string auth_env;  // environment variable holding the bearer token
  std::chrono::milliseconds timeout{30000};
  int max_in_flight = 4;
  RetryPolicy retry;
  std::string fixtures;  // mock rule file, mock backend only
  int embedding_dims = 1024;
};

enum class GatewayErrc { precondition, auth, timeout, transport, refusal, bad_response };

const char* to_string(GatewayErrc e);

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrc code, const std::string& message, int attempts = 1)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), attempts_(attempts) {}

  GatewayErrc code() const { return code_; }
  int attempts() const { return attempts_; }
  bool retryable() const { return code_ == GatewayErrc::timeout || code_ == GatewayErrc::transport; }

 private:
  GatewayErrc code_;
  int attempts_;
};

}  // namespace pipebench::gateway

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/gateway/types.hpp"

namespace pipebench::gateway {

/// A model backend. One call here is one attempt; retries, budgeting and
/// post-condition checks live in Gateway.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual Generation generate(const GenerationRequest& request) = 0;
  virtual std::vector<EmbeddingVec> embed(const std::vector<std::string>& texts) = 0;
  virtual RerankResult rerank(const std::string& query, const std::vector<corpus::ChunkRecord>& chunks) = 0;
};

struct CallStats {
  std::int64_t calls = 0;     // logical calls
  std::int64_t attempts = 0;  // backend invocations including retries
  std::int64_t failures = 0;  // logical calls that ended in an error
  std::int64_t peak_in_flight = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

/// Routes calls to named backend profiles with bounded concurrency and
/// retries. Profiles are registered up front; after that the gateway is
/// safe to share across threads.
class Gateway {
 public:
  Gateway();
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  void add_profile(BackendProfile profile, std::shared_ptr<Backend> backend);
  bool has_profile(std::string_view name) const;
  const BackendProfile& profile(std::string_view name) const;
  std::vector<std::string> profile_names() const;

  Generation generate(const GenerationRequest& request, std::string_view profile);
  std::vector<EmbeddingVec> embed(const std::vector<std::string>& texts, std::string_view profile);
  RerankResult rerank(const std::string& query, const std::vector<corpus::ChunkRecord>& chunks,
                      std::string_view profile);

  /// Stats keyed by operation ("generate", "embed", "rerank").
  std::map<std::string, CallStats> stats(std::string_view profile) const;
  /// Stats for one task tag across all profiles (generate only).
  CallStats task_stats(std::string_view task) const;
  std::int64_t total_calls() const;

 private:
  struct Slot;
  Slot& slot(std::string_view name) const;

  template <class Fn>
  auto call_with_retry(Slot& s, const char* op, std::string_view task, Fn&& fn) -> decltype(fn());

  std::map<std::string, std::unique_ptr<Slot>, std::less<>> slots_;
  mutable std::mutex stats_mu_;
  std::map<std::string, CallStats, std::less<>> task_stats_;
};

/// Builds a backend for a profile (mock or HTTP).
std::shared_ptr<Backend> make_backend(const BackendProfile& profile);

}  // namespace pipebench::gateway

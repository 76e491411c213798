// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/gateway/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "pipebench/common/text.hpp"

namespace pipebench::gateway {

const char* to_string(GatewayErrc e) {
  switch (e) {
    case GatewayErrc::precondition: return "precondition";
    case GatewayErrc::auth: return "auth";
    case GatewayErrc::timeout: return "timeout";
    case GatewayErrc::transport: return "transport";
    case GatewayErrc::refusal: return "refusal";
    case GatewayErrc::bad_response: return "bad_response";
  }
  return "unknown";
}

double cosine(const EmbeddingVec& a, const EmbeddingVec& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.dims(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct Gateway::Slot {
  Slot(BackendProfile p, std::shared_ptr<Backend> b)
      : profile(std::move(p)), backend(std::move(b)), permits(profile.max_in_flight) {}

  BackendProfile profile;
  std::shared_ptr<Backend> backend;
  std::counting_semaphore<std::numeric_limits<int>::max()> permits;
  std::atomic<std::int64_t> in_flight{0};
  mutable std::mutex mu;
  std::map<std::string, CallStats, std::less<>> stats;
};

Gateway::Gateway() = default;
Gateway::~Gateway() = default;

void Gateway::add_profile(BackendProfile profile, std::shared_ptr<Backend> backend) {
  if (profile.name.empty()) throw GatewayError(GatewayErrc::precondition, "profile needs a name");
  if (profile.max_in_flight < 1) {
    throw GatewayError(GatewayErrc::precondition, "profile '" + profile.name + "': max_in_flight must be >= 1");
  }
  if (profile.retry.count < 0) {
    throw GatewayError(GatewayErrc::precondition, "profile '" + profile.name + "': retry count must be >= 0");
  }
  if (!backend) throw GatewayError(GatewayErrc::precondition, "profile '" + profile.name + "': no backend");
  std::string name = profile.name;
  slots_[name] = std::make_unique<Slot>(std::move(profile), std::move(backend));
}

bool Gateway::has_profile(std::string_view name) const { return slots_.find(name) != slots_.end(); }

Gateway::Slot& Gateway::slot(std::string_view name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) {
    throw GatewayError(GatewayErrc::precondition, "unknown backend profile '" + std::string(name) + "'");
  }
  return *it->second;
}

const BackendProfile& Gateway::profile(std::string_view name) const { return slot(name).profile; }

std::vector<std::string> Gateway::profile_names() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : slots_) out.push_back(k);
  return out;
}

template <class Fn>
auto Gateway::call_with_retry(Slot& s, const char* op, std::string_view task, Fn&& fn) -> decltype(fn()) {
  const int max_attempts = s.profile.retry.count + 1;
  auto record = [&](int attempts, bool failed, const Usage& usage) {
    std::lock_guard lk(s.mu);
    auto& st = s.stats[op];
    st.calls += 1;
    st.attempts += attempts;
    st.failures += failed ? 1 : 0;
    st.prompt_tokens += usage.prompt_tokens;
    st.completion_tokens += usage.completion_tokens;
    if (!task.empty()) {
      std::lock_guard tk(stats_mu_);
      auto& ts = task_stats_[std::string(task)];
      ts.calls += 1;
      ts.attempts += attempts;
      ts.failures += failed ? 1 : 0;
    }
  };
  for (int attempt = 1;; ++attempt) {
    s.permits.acquire();
    const std::int64_t now = s.in_flight.fetch_add(1) + 1;
    {
      std::lock_guard lk(s.mu);
      auto& st = s.stats[op];
      st.peak_in_flight = std::max(st.peak_in_flight, now);
    }
    try {
      auto result = fn();
      s.in_flight.fetch_sub(1);
      s.permits.release();
      Usage usage;
      if constexpr (std::is_same_v<decltype(result), Generation>) {
        result.attempts = attempt;
        usage = result.usage;
      }
      record(attempt, false, usage);
      return result;
    } catch (const GatewayError& e) {
      s.in_flight.fetch_sub(1);
      s.permits.release();
      if (!e.retryable() || attempt >= max_attempts) {
        record(attempt, true, {});
        throw GatewayError(e.code(),
                           std::string(e.what()) + " (profile '" + s.profile.name + "', " + std::to_string(attempt) +
                               " attempt" + (attempt == 1 ? "" : "s") + ")",
                           attempt);
      }
    } catch (...) {
      s.in_flight.fetch_sub(1);
      s.permits.release();
      record(attempt, true, {});
      throw;
    }
    if (s.profile.retry.backoff.count() > 0) std::this_thread::sleep_for(s.profile.retry.backoff * attempt);
  }
}

Generation Gateway::generate(const GenerationRequest& request, std::string_view profile) {
  Slot& s = slot(profile);
  if (request.messages.empty()) throw GatewayError(GatewayErrc::precondition, "generation request has no messages");
  if (!std::isfinite(request.temperature) || request.temperature < 0) {
    throw GatewayError(GatewayErrc::precondition, "temperature must be finite and >= 0");
  }
  if (request.max_output <= 0) throw GatewayError(GatewayErrc::precondition, "max_output must be > 0");
  Generation g = call_with_retry(s, "generate", request.task, [&] {
    Generation out = s.backend->generate(request);
    if (text::is_blank(out.text)) throw GatewayError(GatewayErrc::bad_response, "empty generation");
    return out;
  });
  g.text = text::nfc(g.text);
  return g;
}

std::vector<EmbeddingVec> Gateway::embed(const std::vector<std::string>& texts, std::string_view profile) {
  Slot& s = slot(profile);
  if (texts.empty()) throw GatewayError(GatewayErrc::precondition, "embed needs at least one text");
  return call_with_retry(s, "embed", "", [&] {
    auto out = s.backend->embed(texts);
    if (out.size() != texts.size()) {
      throw GatewayError(GatewayErrc::bad_response, "embedding count does not match input count");
    }
    const std::size_t dims = out.front().dims();
    for (const auto& v : out) {
      if (v.dims() == 0 || v.dims() != dims) throw GatewayError(GatewayErrc::bad_response, "ragged embeddings");
      for (double x : v.values) {
        if (!std::isfinite(x)) throw GatewayError(GatewayErrc::bad_response, "non-finite embedding value");
      }
    }
    return out;
  });
}

RerankResult Gateway::rerank(const std::string& query, const std::vector<corpus::ChunkRecord>& chunks,
                             std::string_view profile) {
  Slot& s = slot(profile);
  if (chunks.empty()) throw GatewayError(GatewayErrc::precondition, "rerank needs at least one chunk");
  return call_with_retry(s, "rerank", "", [&] {
    RerankResult r = s.backend->rerank(query, chunks);
    std::multiset<std::string> expected, got;
    for (const auto& c : chunks) expected.insert(c.id);
    for (const auto& e : r.entries) {
      if (!std::isfinite(e.score)) throw GatewayError(GatewayErrc::bad_response, "non-finite rerank score");
      got.insert(e.chunk_id);
    }
    if (expected != got) throw GatewayError(GatewayErrc::bad_response, "rerank result is not a permutation of inputs");
    std::stable_sort(r.entries.begin(), r.entries.end(),
                     [](const RerankEntry& a, const RerankEntry& b) { return a.score > b.score; });
    return r;
  });
}

std::map<std::string, CallStats> Gateway::stats(std::string_view profile) const {
  Slot& s = slot(profile);
  std::lock_guard lk(s.mu);
  return {s.stats.begin(), s.stats.end()};
}

CallStats Gateway::task_stats(std::string_view task) const {
  std::lock_guard lk(stats_mu_);
  auto it = task_stats_.find(task);
  return it == task_stats_.end() ? CallStats{} : it->second;
}

std::int64_t Gateway::total_calls() const {
  std::int64_t n = 0;
  for (const auto& [_, s] : slots_) {
    std::lock_guard lk(s->mu);
    for (const auto& [op, st] : s->stats) n += st.calls;
  }
  return n;
}

}  // namespace pipebench::gateway

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/gateway/http_backend.hpp"

#include <httplib.h>

#include <cstdlib>

#include "pipebench/gateway/mock_backend.hpp"

namespace pipebench::gateway {

using nlohmann::json;

HttpBackend::HttpBackend(BackendProfile profile) : profile_(std::move(profile)) {
  const std::string& ep = profile_.endpoint;
  auto scheme_end = ep.find("://");
  if (scheme_end == std::string::npos) {
    throw GatewayError(GatewayErrc::precondition, "profile '" + profile_.name + "': endpoint needs a scheme");
  }
  auto path_start = ep.find('/', scheme_end + 3);
  origin_ = ep.substr(0, path_start);
  base_path_ = path_start == std::string::npos ? "" : ep.substr(path_start);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

json HttpBackend::chat_body(const BackendProfile& profile, const GenerationRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.text}});
  json body = {{"model", profile.model},
               {"messages", messages},
               {"temperature", request.temperature},
               {"max_tokens", request.max_output}};
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

json HttpBackend::post(const std::string& path, const std::string& body) {
  httplib::Headers headers;
  if (!profile_.auth_env.empty()) {
    const char* token = std::getenv(profile_.auth_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw GatewayError(GatewayErrc::auth, "environment variable '" + profile_.auth_env + "' is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(profile_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(profile_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto res = client.Post(base_path_ + path, headers, body, "application/json");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw GatewayError(GatewayErrc::timeout, origin_ + base_path_ + path + ": " + httplib::to_string(err));
    }
    throw GatewayError(GatewayErrc::transport, origin_ + base_path_ + path + ": " + httplib::to_string(err));
  }
  const int status = res->status;
  if (status == 408) throw GatewayError(GatewayErrc::timeout, "HTTP 408");
  if (status == 429 || status >= 500) {
    throw GatewayError(GatewayErrc::transport, "HTTP " + std::to_string(status));
  }
  if (status == 401 || status == 403) throw GatewayError(GatewayErrc::auth, "HTTP " + std::to_string(status));
  if (status >= 400) {
    throw GatewayError(GatewayErrc::refusal, "HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));
  }
  try {
    return json::parse(res->body);
  } catch (const std::exception& e) {
    throw GatewayError(GatewayErrc::bad_response, std::string("unparseable response body: ") + e.what());
  }
}

Generation HttpBackend::generate(const GenerationRequest& request) {
  json j = post("/chat/completions", chat_body(profile_, request).dump());
  try {
    const auto& choice = j.at("choices").at(0);
    if (choice.value("finish_reason", "") == "content_filter") {
      throw GatewayError(GatewayErrc::refusal, "content filter");
    }
    Generation g;
    g.text = choice.at("message").at("content").get<std::string>();
    if (j.contains("usage")) {
      g.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      g.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    return g;
  } catch (const json::exception& e) {
    throw GatewayError(GatewayErrc::bad_response, std::string("chat response: ") + e.what());
  }
}

std::vector<EmbeddingVec> HttpBackend::embed(const std::vector<std::string>& texts) {
  json body = {{"model", profile_.model}, {"input", texts}};
  json j = post("/embeddings", body.dump());
  try {
    std::vector<EmbeddingVec> out(texts.size());
    const auto& data = j.at("data");
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t idx = data[i].value("index", i);
      if (idx >= out.size()) throw GatewayError(GatewayErrc::bad_response, "embedding index out of range");
      out[idx].values = data[i].at("embedding").get<std::vector<double>>();
    }
    return out;
  } catch (const json::exception& e) {
    throw GatewayError(GatewayErrc::bad_response, std::string("embedding response: ") + e.what());
  }
}

RerankResult HttpBackend::rerank(const std::string& query, const std::vector<corpus::ChunkRecord>& chunks) {
  json docs = json::array();
  for (const auto& c : chunks) docs.push_back(c.text);
  json body = {{"model", profile_.model}, {"query", query}, {"documents", docs}};
  json j = post("/rerank", body.dump());
  try {
    RerankResult r;
    for (const auto& e : j.at("results")) {
      std::size_t idx = e.at("index").get<std::size_t>();
      if (idx >= chunks.size()) throw GatewayError(GatewayErrc::bad_response, "rerank index out of range");
      r.entries.push_back({chunks[idx].id, e.at("relevance_score").get<double>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw GatewayError(GatewayErrc::bad_response, std::string("rerank response: ") + e.what());
  }
}

std::shared_ptr<Backend> make_backend(const BackendProfile& profile) {
  if (profile.backend == BackendKind::http) return std::make_shared<HttpBackend>(profile);
  std::vector<MockRule> rules;
  if (!profile.fixtures.empty()) rules = load_mock_rules(profile.fixtures);
  return std::make_shared<MockBackend>(std::move(rules), profile.embedding_dims,
                                       profile.model.empty() ? profile.name : profile.model);
}

}  // namespace pipebench::gateway

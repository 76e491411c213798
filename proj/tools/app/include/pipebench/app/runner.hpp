// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pipebench/app/config.hpp"
#include "pipebench/corpus/records.hpp"
#include "pipebench/gateway/gateway.hpp"

namespace pipebench::app {

struct StageCounts {
  std::size_t in = 0, kept = 0, removed = 0, unresolved = 0;

  bool conserved() const { return in == kept + removed + unresolved; }
  bool operator==(const StageCounts&) const = default;
};

struct OutputFile {
  std::string name;
  std::filesystem::path path;
  std::size_t count = 0;
};

/// Written as run_manifest.json next to a stage's outputs.
struct RunManifest {
  std::string stage;
  nlohmann::json config;  // resolved snapshot
  std::uint64_t seed = 0;        // run seed
  std::uint64_t stage_seed = 0;  // derived for this stage
  double elapsed_ms = 0.0;
  std::map<std::string, double> timings_ms;
  StageCounts counts;
  std::map<std::string, StageCounts> substages;
  nlohmann::json gateway = nlohmann::json::object();  // per-profile and per-task call counts
  std::vector<OutputFile> outputs;
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const RunManifest& m);

/// Output of `retrieve iterate`, one per query.
struct RetrievalRecord {
  static constexpr std::string_view kind = "retrieval";
  std::string id;  // query id
  std::string query;
  std::vector<std::string> chunk_ids;  // first-seen order
  std::int64_t iterations = 0;
  std::string stop;
  nlohmann::json trace = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();
  bool operator==(const RetrievalRecord&) const = default;
};

void to_json(nlohmann::json& j, const RetrievalRecord& r);
void from_json(const nlohmann::json& j, RetrievalRecord& r);
std::vector<corpus::Violation> validate_record(const RetrievalRecord& r);

/// A gateway with every configured profile registered.
std::unique_ptr<gateway::Gateway> make_gateway(const RunConfig& cfg);

/// Directory holding a stage's outputs.
std::filesystem::path stage_dir(const RunConfig& cfg, const std::string& stage);

/// Runs one stage with exactly the configured parameters and writes its
/// outputs plus run_manifest.json under stage_dir(). Throws ConfigError for
/// an unknown stage or a missing required input.
RunManifest run_stage(const std::string& stage, const RunConfig& cfg);

/// curate (dedup, screen, distill) -> prefgen -> ragsft -> eval.
std::vector<RunManifest> run_pipeline(const RunConfig& cfg);

/// Collected run manifests found under the output directory.
nlohmann::json collect_report(const RunConfig& cfg);

}  // namespace pipebench::app

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/curation/llm_stages.hpp"

namespace pipebench::evalengine {

using curation::StageCall;

enum class StatementSource { response, ground_truth };

inline constexpr corpus::EnumNames<StatementSource, 2> kStatementSourceNames{{{
    {StatementSource::response, "response"},
    {StatementSource::ground_truth, "ground_truth"},
}}};

struct Statement {
  std::string id;  // "<parent>:<r|g><index>"
  StatementSource source = StatementSource::response;
  std::string text;
  std::string parent_id;

  bool operator==(const Statement&) const = default;
};

/// Persisted extraction keyed by content hash of (text, role, extractor model).
struct StatementCacheEntry {
  static constexpr std::string_view kind = "statement_cache";

  std::string id;  // content hash
  StatementSource source = StatementSource::response;
  std::string model;
  std::vector<std::string> statements;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const StatementCacheEntry&) const = default;
};

void to_json(nlohmann::json& j, const StatementCacheEntry& r);
void from_json(const nlohmann::json& j, StatementCacheEntry& r);
std::vector<corpus::Violation> validate_record(const StatementCacheEntry& r);

/// Concurrent reads, exclusive insertion.
class StatementCache {
 public:
  StatementCache() = default;
  StatementCache(StatementCache&& other) noexcept : entries_(std::move(other.entries_)) {}

  static std::string key(std::string_view text, StatementSource source, std::string_view model);

  std::optional<std::vector<std::string>> find(const std::string& key) const;
  void insert(StatementCacheEntry entry);
  std::size_t size() const;

  /// Missing file loads as empty.
  static StatementCache load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, StatementCacheEntry> entries_;
};

/// Decomposes text into statements, served from the cache when possible.
/// Throws std::invalid_argument on blank text and std::runtime_error when the
/// extractor yields nothing.
std::vector<Statement> extract_statements(std::string_view text, StatementSource role, const std::string& parent_id,
                                          const StageCall& extractor, StatementCache& cache);

struct EntailmentVerdict {
  std::string statement_id;
  bool supported = false;
  std::string judge_model;
  std::string raw_hash;  // content hash of the raw judge reply

  bool operator==(const EntailmentVerdict&) const = default;
};

struct SupportOutcome {
  std::optional<EntailmentVerdict> verdict;  // empty: unresolved
  std::string error;
};

SupportOutcome judge_support(const Statement& statement, std::string_view context, const StageCall& judge);

}  // namespace pipebench::evalengine

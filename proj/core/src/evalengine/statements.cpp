// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/evalengine/statements.hpp"

#include <mutex>
#include <stdexcept>

#include "pipebench/common/text.hpp"
#include "pipebench/corpus/dataset.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::evalengine {

using nlohmann::json;
namespace reply = gateway::reply;

void to_json(json& j, const StatementCacheEntry& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["source"] = kStatementSourceNames.name(r.source);
  j["model"] = r.model;
  j["statements"] = r.statements;
}

void from_json(const json& j, StatementCacheEntry& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.source = f.enumerated("source", kStatementSourceNames);
  r.model = f.text("model");
  r.statements.clear();
  for (const auto& s : f.raw("statements")) r.statements.push_back(text::nfc(s.get<std::string>()));
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const StatementCacheEntry& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  corpus::require_text(v, "model", r.model);
  if (r.statements.empty()) v.push_back({"statements", "must not be empty"});
  for (const auto& s : r.statements) {
    if (text::is_blank(s)) {
      v.push_back({"statements", "entries must not be blank"});
      break;
    }
  }
  return v;
}

std::string StatementCache::key(std::string_view text, StatementSource source, std::string_view model) {
  return text::content_hash({text, kStatementSourceNames.name(source), model});
}

std::optional<std::vector<std::string>> StatementCache::find(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.statements;
}

void StatementCache::insert(StatementCacheEntry entry) {
  std::unique_lock lock(mu_);
  entries_.try_emplace(entry.id, std::move(entry));
}

std::size_t StatementCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

StatementCache StatementCache::load(const std::filesystem::path& path) {
  StatementCache c;
  if (!std::filesystem::exists(path)) return c;
  for (auto& e : corpus::read_dataset<StatementCacheEntry>(path).records) c.entries_.emplace(e.id, std::move(e));
  return c;
}

void StatementCache::save(const std::filesystem::path& path) const {
  std::vector<StatementCacheEntry> all;
  {
    std::shared_lock lock(mu_);
    for (const auto& [k, e] : entries_) all.push_back(e);
  }
  corpus::write_dataset(all, path);
}

std::vector<Statement> extract_statements(std::string_view input, StatementSource role, const std::string& parent_id,
                                          const StageCall& extractor, StatementCache& cache) {
  if (text::is_blank(input)) throw std::invalid_argument("extract_statements: blank text");
  const std::string norm = text::nfc(input);
  const std::string model = extractor.gw.profile(extractor.profile).model;
  const std::string key = StatementCache::key(norm, role, model);

  std::vector<std::string> items;
  if (auto hit = cache.find(key)) {
    items = std::move(*hit);
  } else {
    auto req = extractor.prompts.render(gateway::tasks::kExtractStatements,
                                        {{"text", norm}, {"role", std::string(kStatementSourceNames.name(role))}},
                                        extractor.temperature);
    for (auto& b : reply::bullets(extractor.gw.generate(req, extractor.profile).text)) {
      b = text::trim(b);
      if (!b.empty()) items.push_back(std::move(b));
    }
    if (items.empty()) throw std::runtime_error("extract_statements: extractor produced no statements");
    cache.insert({key, role, model, items, json::object()});
  }

  std::vector<Statement> out;
  const char tag = role == StatementSource::response ? 'r' : 'g';
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back({parent_id + ":" + tag + std::to_string(i + 1), role, items[i], parent_id});
  }
  return out;
}

SupportOutcome judge_support(const Statement& statement, std::string_view context, const StageCall& judge) {
  if (text::is_blank(statement.text) || text::is_blank(context)) {
    throw std::invalid_argument("judge_support: statement and context must be non-empty");
  }
  SupportOutcome out;
  try {
    auto req = judge.prompts.render(gateway::tasks::kJudgeSupport,
                                    {{"statement", statement.text}, {"context", std::string(context)}},
                                    judge.temperature);
    const std::string raw = judge.gw.generate(req, judge.profile).text;
    auto f = reply::field(raw, "SUPPORTED");
    const std::string v = f ? reply::lower(text::trim(*f)) : "";
    if (v != "yes" && v != "no") {
      out.error = "no yes/no SUPPORTED verdict";
      return out;
    }
    out.verdict = EntailmentVerdict{statement.id, v == "yes", judge.gw.profile(judge.profile).model,
                                    text::content_hash({raw})};
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace pipebench::evalengine

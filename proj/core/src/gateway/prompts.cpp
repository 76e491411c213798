// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/gateway/prompts.hpp"

#include <fstream>

namespace pipebench::gateway {

namespace tasks {
std::vector<std::string_view> all() {
  return {kQuestionFilter,  kDedupAdjudicate,   kComplexityRewrite,    kComplexityJudge,  kDistillAnswer,
          kDistillJudge,    kSampleResponse,    kRankCandidates,       kJudgePair,        kScoreResponse,
          kDomainLabel,     kSemanticRelevance, kParaphrase,           kCoverageAnalysis, kTopicExtraction,
          kQueryGeneration, kAnswerGeneration,  kReferenceStandardize, kReferenceRefine,  kExtractStatements,
          kJudgeSupport};
}
}  // namespace tasks

std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tpl.size());
  size_t i = 0;
  while (i < tpl.size()) {
    size_t open = tpl.find("{{", i);
    if (open == std::string_view::npos) {
      out.append(tpl.substr(i));
      break;
    }
    out.append(tpl.substr(i, open - i));
    size_t close = tpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw PromptError("unterminated placeholder in template");
    std::string name(tpl.substr(open + 2, close - open - 2));
    auto it = vars.find(name);
    if (it == vars.end()) throw PromptError("template placeholder '{{" + name + "}}' has no value");
    out.append(it->second);
    i = close + 2;
  }
  return out;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PromptError("cannot open prompt library '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw PromptError("prompt library '" + path.string() + "': " + e.what());
  }
  return from_json(j);
}

PromptLibrary PromptLibrary::from_json(const nlohmann::json& j) {
  PromptLibrary lib;
  const auto& prompts = j.contains("prompts") ? j.at("prompts") : j;
  if (!prompts.is_object()) throw PromptError("prompt library: 'prompts' must be an object");
  for (auto it = prompts.begin(); it != prompts.end(); ++it) {
    const auto& t = it.value();
    if (!t.is_object() || !t.contains("user") || !t.at("user").is_string()) {
      throw PromptError("prompt '" + it.key() + "': needs a 'user' template string");
    }
    Template tpl;
    tpl.user = t.at("user").get<std::string>();
    if (t.contains("system")) tpl.system = t.at("system").get<std::string>();
    lib.templates_[it.key()] = std::move(tpl);
  }
  return lib;
}

bool PromptLibrary::has(std::string_view task) const { return templates_.find(task) != templates_.end(); }

std::vector<std::string> PromptLibrary::missing_tasks() const {
  std::vector<std::string> out;
  for (auto t : tasks::all()) {
    if (!has(t)) out.emplace_back(t);
  }
  return out;
}

GenerationRequest PromptLibrary::render(std::string_view task, std::map<std::string, std::string> vars,
                                        double temperature, std::optional<std::int64_t> seed) const {
  auto it = templates_.find(task);
  if (it == templates_.end()) throw PromptError("no prompt template for task '" + std::string(task) + "'");
  GenerationRequest req;
  req.task = std::string(task);
  if (!it->second.system.empty()) req.messages.push_back({"system", render_template(it->second.system, vars)});
  req.messages.push_back({"user", render_template(it->second.user, vars)});
  req.vars = std::move(vars);
  req.temperature = temperature;
  req.seed = seed;
  return req;
}

}  // namespace pipebench::gateway

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "pipebench/corpus/dataset.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::app {

namespace fs = std::filesystem;
using json = nlohmann::json;
using corpus::Violation;

namespace {

const std::vector<std::string> kRoles = {
    "filter_judge", "adjudicator", "rewriter",  "complexity_judge", "distill_judge",   "policy",
    "preference_judge", "embedder", "reranker", "generator",        "analyst",         "relevance_judge",
    "paraphraser",  "extractor",   "entailment_judge", "reference_editor"};

// Stage inputs that may name an upstream stage as "@stage".
const std::map<std::string, std::vector<std::string>> kChainable = {
    {"dedup", {}}, {"screen", {"dedup"}}, {"distill", {"dedup", "screen"}}, {"prefgen", {"dedup", "screen", "distill"}}};

json profile_template() {
  return {{"backend", "mock"},   {"endpoint", ""},   {"model", ""},
          {"auth_env", ""},      {"timeout_ms", 30000}, {"max_in_flight", 4},
          {"retry", {{"count", 0}, {"backoff_ms", 0}}}, {"fixtures", ""}, {"embedding_dims", 1024}};
}

json merge(json base, const json& over) {
  if (!base.is_object() || !over.is_object()) return over;
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (base.contains(it.key())) base[it.key()] = merge(base[it.key()], it.value());
    else base[it.key()] = it.value();
  }
  return base;
}

std::string type_name(const json& j) {
  if (j.is_number_integer()) return "integer";
  if (j.is_number()) return "number";
  return j.type_name();
}

bool same_shape(const json& want, const json& got) {
  if (want.is_number_integer()) return got.is_number_integer();
  if (want.is_number()) return got.is_number();
  return want.type() == got.type();
}

// Unknown keys and type mismatches against a template.
// Offending keys are erased from `doc` so later checks see only well-typed
// values (defaults fill the gaps).
void check_shape(const json& tpl, json& doc, const std::string& path, std::vector<Violation>& out) {
  std::vector<std::string> drop;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string p = path.empty() ? it.key() : path + "." + it.key();
    if (!tpl.contains(it.key())) {
      out.push_back({p, "unknown field"});
      drop.push_back(it.key());
      continue;
    }
    const json& want = tpl.at(it.key());
    if (!same_shape(want, it.value())) {
      out.push_back({p, "must be " + type_name(want) + ", got " + type_name(it.value())});
      drop.push_back(it.key());
      continue;
    }
    if (want.is_object() && !want.empty()) check_shape(want, it.value(), p, out);
    if (want.is_array()) {
      for (std::size_t i = 0; i < it.value().size(); ++i) {
        if (!it.value()[i].is_string()) {
          out.push_back({p + "[" + std::to_string(i) + "]", "must be string"});
          drop.push_back(it.key());
          break;
        }
      }
    }
  }
  for (const auto& k : drop) doc.erase(k);
}

struct Range {
  const char* path;  // "stage.key"
  double lo, hi;
  bool lo_open, hi_open;
};

// Documented ranges, checked after the shape pass.
const Range kRanges[] = {
    {"dedup.simhash_low", 0, 1, false, false},
    {"dedup.simhash_high", 0, 1, false, false},
    {"dedup.embedding_threshold", -1, 1, false, false},
    {"dedup.batch_size", 1, 1e9, false, false},
    {"dedup.adjudicator_temperature", 0, 2, false, false},
    {"screen.alpha", 0, 1e9, false, false},
    {"screen.beta", 0, 1e9, false, false},
    {"screen.filter_temperature", 0, 2, false, false},
    {"distill.max_rounds", 1, 100, false, false},
    {"distill.samples_per_teacher", 1, 100, false, false},
    {"distill.rewrite_temperature", 0, 2, false, false},
    {"distill.teacher_temperature", 0, 2, false, false},
    {"distill.judge_temperature", 0, 2, false, false},
    {"prefgen.samples", 2, 100, false, false},
    {"prefgen.temperature", 0, 2, false, false},
    {"prefgen.judge_temperature", 0, 2, false, false},
    {"prefgen.confirm_rounds", 1, 100, false, false},
    {"prefgen.min_score", 0, 10, false, false},
    {"prefgen.cap_per_label", 1, 1e12, false, false},
    {"dpo_loss.beta", 0, 1e6, true, false},
    {"mine_negatives.min_overlap", 0, 1, false, true},
    {"mine_negatives.k1", 0, 1e6, false, false},
    {"mine_negatives.b", 0, 1, false, false},
    {"mine_negatives.cross_domain_top_m", 0, 1e6, false, false},
    {"mine_negatives.adversarial_k", 0, 100, false, false},
    {"mine_negatives.judge_temperature", 0, 2, false, false},
    {"select_hard.every_n", 1, 1e15, false, false},
    {"select_hard.top_fraction", 0, 1, false, false},
    {"iterate.max_iterations", 1, 100, false, false},
    {"iterate.per_round_k", 1, 1e6, false, false},
    {"iterate.min_similarity", -1, 1, false, true},
    {"iterate.temperature", 0, 2, false, false},
    {"ragsft.temperature", 0, 2, false, false},
    {"eval.alpha", 0, 1, false, false},
    {"eval.beta", 0, 1, false, false},
    {"eval.temperature", 0, 2, false, false},
    {"review.port", 0, 65535, false, false},
};

void check_ranges(const json& stages, std::vector<Violation>& out) {
  for (const Range& r : kRanges) {
    std::string p = r.path;
    auto dot = p.find('.');
    const json& st = stages.at(p.substr(0, dot));
    const json& v = st.at(p.substr(dot + 1));
    if (!v.is_number()) continue;  // reported by the shape pass
    double x = v.get<double>();
    bool ok = std::isfinite(x) && (r.lo_open ? x > r.lo : x >= r.lo) && (r.hi_open ? x < r.hi : x <= r.hi);
    if (!ok) {
      std::string lo = r.lo_open ? "(" : "[";
      std::string hi = r.hi_open ? ")" : "]";
      auto fmt = [](double d) {
        json j = d;
        return std::floor(d) == d && std::fabs(d) < 1e15 ? std::to_string(static_cast<long long>(d)) : j.dump();
      };
      out.push_back({"stages." + p, "must be in " + lo + fmt(r.lo) + ", " + fmt(r.hi) + hi});
    }
  }
}

bool is_number(const json& j, const char* key) { return j.contains(key) && j.at(key).is_number(); }

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> kNames = {"dedup",          "screen",      "distill", "prefgen", "dpo_loss",
                                                  "mine_negatives", "select_hard", "iterate", "ragsft",  "eval"};
  return kNames;
}

const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> kNames = {"dedup", "screen", "distill", "prefgen", "ragsft", "eval"};
  return kNames;
}

json default_config() {
  json roles = json::object();
  for (const auto& r : kRoles) roles[r] = "mock";
  roles["teachers"] = json::array({"mock"});
  json mock = profile_template();
  return {
      {"seed", 0},
      {"max_workers", 4},
      {"output_dir", "out"},
      {"prompts", "prompts.json"},
      {"profiles", {{"mock", mock}}},
      {"roles", roles},
      {"stages",
       {
           {"dedup",
            {{"input", ""},
             {"simhash_low", 0.7},
             {"simhash_high", 0.9},
             {"embedding_threshold", 0.9},
             {"batch_size", 64},
             {"adjudicator_temperature", 0.0}}},
           {"screen", {{"input", "@dedup"}, {"signals", ""}, {"alpha", 0.5}, {"beta", 0.5}, {"filter_temperature", 0.0}}},
           {"distill",
            {{"input", "@screen"},
             {"max_rounds", 3},
             {"rewrite_temperature", 0.7},
             {"samples_per_teacher", 2},
             {"teacher_temperature", 0.7},
             {"judge_temperature", 0.0}}},
           {"prefgen",
            {{"input", "@distill"},
             {"samples", 4},
             {"temperature", 0.9},
             {"judge_temperature", 0.0},
             {"confirm_rounds", 2},
             {"min_score", 6.0},
             {"labels", json::array()},
             {"cap_per_label", 1000}}},
           {"dpo_loss", {{"input", ""}, {"beta", 0.1}}},
           {"mine_negatives",
            {{"chunks", ""},
             {"min_overlap", 0.7},
             {"k1", 1.2},
             {"b", 0.75},
             {"cross_domain_top_m", 2},
             {"adversarial_k", 2},
             {"positives", json::array()},
             {"judge_temperature", 0.0}}},
           {"select_hard", {{"losses", ""}, {"every_n", 1000}, {"top_fraction", 0.1}}},
           {"iterate",
            {{"queries", ""},
             {"chunks", ""},
             {"max_iterations", 3},
             {"per_round_k", 4},
             {"min_similarity", 0.0},
             {"rerank", true},
             {"temperature", 0.0}}},
           {"ragsft", {{"chunks", ""}, {"temperature", 0.0}}},
           {"eval",
            {{"cases", ""},
             {"outputs", ""},
             {"alpha", 0.3},
             {"beta", 0.7},
             {"prepare_reference", false},
             {"cache", ""},
             {"temperature", 0.0}}},
           {"review", {{"data_dir", "review"}, {"host", "127.0.0.1"}, {"port", 8080}}},
       }},
  };
}

std::vector<Violation> validate_config(const json& raw, const fs::path& base_dir) {
  std::vector<Violation> out;
  if (!raw.is_object()) return {{"", "config must be a JSON object"}};

  // Shape: profiles are a free-form map checked against the profile template.
  json tpl = default_config();
  json top = raw;
  json profiles = top.contains("profiles") ? top["profiles"] : json::object();
  top.erase("profiles");
  check_shape(tpl, top, "", out);
  if (!profiles.is_object()) {
    out.push_back({"profiles", "must be an object"});
    profiles = json::object();
  }
  if (profiles.empty() && raw.contains("profiles")) out.push_back({"profiles", "must define at least one profile"});
  for (auto it = profiles.begin(); it != profiles.end(); ++it) {
    if (!it.value().is_object()) {
      out.push_back({"profiles." + it.key(), "must be an object"});
      it.value() = json::object();
    }
    check_shape(profile_template(), it.value(), "profiles." + it.key(), out);
  }

  json doc = merge(tpl, top);
  if (raw.contains("profiles")) doc["profiles"] = profiles;
  for (auto it = doc["profiles"].begin(); it != doc["profiles"].end(); ++it) it.value() = merge(profile_template(), it.value());

  auto exists = [&](const std::string& field, const std::string& p) {
    if (p.empty()) return;
    fs::path path = fs::path(p).is_absolute() ? fs::path(p) : base_dir / p;
    if (!fs::exists(path)) out.push_back({field, "path does not exist: " + p});
  };

  if (doc["max_workers"].get<long long>() < 1) out.push_back({"max_workers", "must be >= 1"});
  if (!doc["seed"].is_number_unsigned() && doc["seed"].get<long long>() < 0) out.push_back({"seed", "must be >= 0"});
  if (doc["output_dir"].get<std::string>().empty()) out.push_back({"output_dir", "must not be empty"});
  if (doc["prompts"].get<std::string>().empty()) out.push_back({"prompts", "must not be empty"});
  else exists("prompts", doc["prompts"].get<std::string>());

  for (auto it = doc["profiles"].begin(); it != doc["profiles"].end(); ++it) {
    const std::string p = "profiles." + it.key();
    const json& pr = it.value();
    const std::string backend = pr["backend"].get<std::string>();
    if (backend != "mock" && backend != "http") out.push_back({p + ".backend", "must be 'mock' or 'http'"});
    if (backend == "http" && pr["endpoint"].get<std::string>().empty()) out.push_back({p + ".endpoint", "required for http backends"});
    if (backend == "http" && pr["model"].get<std::string>().empty()) out.push_back({p + ".model", "required for http backends"});
    if (pr["timeout_ms"].get<long long>() < 1) out.push_back({p + ".timeout_ms", "must be >= 1"});
    if (pr["max_in_flight"].get<long long>() < 1) out.push_back({p + ".max_in_flight", "must be >= 1"});
    if (pr["retry"]["count"].get<long long>() < 0) out.push_back({p + ".retry.count", "must be >= 0"});
    if (pr["retry"]["backoff_ms"].get<long long>() < 0) out.push_back({p + ".retry.backoff_ms", "must be >= 0"});
    if (pr["embedding_dims"].get<long long>() < 1) out.push_back({p + ".embedding_dims", "must be >= 1"});
    exists(p + ".fixtures", pr["fixtures"].get<std::string>());
  }

  for (auto it = doc["roles"].begin(); it != doc["roles"].end(); ++it) {
    std::vector<std::string> names;
    if (it.value().is_array()) {
      for (const auto& n : it.value()) names.push_back(n.get<std::string>());
      if (names.empty()) out.push_back({"roles." + it.key(), "must name at least one profile"});
    } else {
      names.push_back(it.value().get<std::string>());
    }
    for (const auto& n : names) {
      if (!doc["profiles"].contains(n)) out.push_back({"roles." + it.key(), "unknown profile '" + n + "'"});
    }
  }

  const json& st = doc["stages"];
  check_ranges(st, out);
  if (is_number(st["dedup"], "simhash_low") && st["dedup"]["simhash_low"].get<double>() >= st["dedup"]["simhash_high"].get<double>()) {
    out.push_back({"stages.dedup.simhash_low", "must be < stages.dedup.simhash_high"});
  }
  {
    double a = st["eval"]["alpha"].get<double>(), b = st["eval"]["beta"].get<double>();
    if (std::fabs(a + b - 1.0) > 1e-9) out.push_back({"stages.eval.alpha", "stages.eval.alpha + stages.eval.beta must equal 1"});
  }
  if (st["screen"]["alpha"].get<double>() + st["screen"]["beta"].get<double>() <= 0.0) {
    out.push_back({"stages.screen.alpha", "stages.screen.alpha + stages.screen.beta must be > 0"});
  }
  {
    const json& labels = st["prefgen"]["labels"];
    std::set<std::string> seen;
    for (const auto& l : labels) {
      if (l.get<std::string>().empty() || !seen.insert(gateway::reply::lower(l.get<std::string>())).second) {
        out.push_back({"stages.prefgen.labels", "labels must be non-empty and distinct"});
        break;
      }
    }
  }

  // Inputs: "@stage" names an upstream output, anything else is a path.
  for (auto sit = st.begin(); sit != st.end(); ++sit) {
    for (auto kit = sit.value().begin(); kit != sit.value().end(); ++kit) {
      static const std::set<std::string> kPathKeys = {"input", "signals", "chunks", "losses", "queries", "cases", "outputs"};
      if (!kPathKeys.count(kit.key())) continue;
      const std::string field = "stages." + sit.key() + "." + kit.key();
      const std::string v = kit.value().get<std::string>();
      if (v.starts_with("@")) {
        auto chain = kChainable.find(sit.key());
        const std::string up = v.substr(1);
        if (kit.key() != "input" || chain == kChainable.end() ||
            std::find(chain->second.begin(), chain->second.end(), up) == chain->second.end()) {
          out.push_back({field, "cannot reference stage '" + up + "'"});
        }
      } else {
        exists(field, v);
      }
    }
  }
  return out;
}

RunConfig config_from_json(const json& raw, const fs::path& base_dir) {
  auto v = validate_config(raw, base_dir);
  if (!v.empty()) throw ConfigError("invalid config (" + std::to_string(v.size()) + " violations)", v);
  RunConfig cfg;
  cfg.base_dir = fs::absolute(base_dir).lexically_normal();
  json top = raw;
  json profiles = top.contains("profiles") ? top["profiles"] : json();
  top.erase("profiles");
  cfg.doc = merge(default_config(), top);
  if (!profiles.is_null()) cfg.doc["profiles"] = profiles;
  for (auto it = cfg.doc["profiles"].begin(); it != cfg.doc["profiles"].end(); ++it) {
    it.value() = merge(profile_template(), it.value());
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  RunConfig cfg = config_from_json(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
  cfg.source = fs::absolute(path).lexically_normal();
  return cfg;
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.doc["seed"] = *o.seed;
  if (o.output_dir) cfg.doc["output_dir"] = fs::absolute(*o.output_dir).lexically_normal().string();
  if (o.mock) {
    for (auto it = cfg.doc["profiles"].begin(); it != cfg.doc["profiles"].end(); ++it) it.value()["backend"] = "mock";
  }
}

std::uint64_t RunConfig::seed() const { return doc.at("seed").get<std::uint64_t>(); }
std::size_t RunConfig::max_workers() const { return doc.at("max_workers").get<std::size_t>(); }
fs::path RunConfig::output_dir() const { return resolve(doc.at("output_dir").get<std::string>()); }
fs::path RunConfig::prompts_path() const { return resolve(doc.at("prompts").get<std::string>()); }

fs::path RunConfig::resolve(const std::string& path) const {
  if (path.empty()) return {};
  fs::path p(path);
  return (p.is_absolute() ? p : base_dir / p).lexically_normal();
}

std::map<std::string, gateway::BackendProfile> RunConfig::profiles() const {
  std::map<std::string, gateway::BackendProfile> out;
  for (auto it = doc.at("profiles").begin(); it != doc.at("profiles").end(); ++it) {
    const json& j = it.value();
    gateway::BackendProfile p;
    p.name = it.key();
    p.backend = j.at("backend").get<std::string>() == "http" ? gateway::BackendKind::http : gateway::BackendKind::mock;
    p.endpoint = j.at("endpoint").get<std::string>();
    p.model = j.at("model").get<std::string>();
    p.auth_env = j.at("auth_env").get<std::string>();
    p.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long long>());
    p.max_in_flight = j.at("max_in_flight").get<int>();
    p.retry.count = j.at("retry").at("count").get<int>();
    p.retry.backoff = std::chrono::milliseconds(j.at("retry").at("backoff_ms").get<long long>());
    p.fixtures = resolve(j.at("fixtures").get<std::string>()).string();
    p.embedding_dims = j.at("embedding_dims").get<int>();
    out.emplace(p.name, std::move(p));
  }
  return out;
}

std::string RunConfig::role(const std::string& name) const {
  const json& r = doc.at("roles").at(name);
  return r.is_array() ? r.at(0).get<std::string>() : r.get<std::string>();
}

std::vector<std::string> RunConfig::role_list(const std::string& name) const {
  const json& r = doc.at("roles").at(name);
  if (r.is_array()) return r.get<std::vector<std::string>>();
  return {r.get<std::string>()};
}

const json& RunConfig::stage(const std::string& name) const { return doc.at("stages").at(name); }

json RunConfig::snapshot() const {
  json s = doc;
  s["output_dir"] = output_dir().string();
  s["prompts"] = prompts_path().string();
  for (auto it = s["profiles"].begin(); it != s["profiles"].end(); ++it) {
    it.value()["fixtures"] = resolve(it.value()["fixtures"].get<std::string>()).string();
  }
  for (auto sit = s["stages"].begin(); sit != s["stages"].end(); ++sit) {
    for (auto kit = sit.value().begin(); kit != sit.value().end(); ++kit) {
      if (!kit.value().is_string()) continue;
      std::string v = kit.value().get<std::string>();
      if (kit.key() == "host" || v.empty() || v.starts_with("@")) continue;
      kit.value() = resolve(v).string();
    }
  }
  return s;
}

}  // namespace pipebench::app

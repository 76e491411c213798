// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

// pipebench: one entry point for every pipeline stage.
//
// Exit status: 0 success, 1 stage failure, 2 usage or config error,
// 3 finished but some records landed in an unresolved bucket.

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pipebench/app/config.hpp"
#include "pipebench/app/runner.hpp"
#include "pipebench/corpus/dataset.hpp"
#include "pipebench/evalengine/evaluate.hpp"
#include "pipebench/review/server.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pipebench;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr int kUnresolved = 3;

struct Options {
  std::string config = "config/reference.json";
  std::optional<std::uint64_t> seed;
  bool mock = false;
  std::string output_dir;
  std::vector<std::string> sets;  // dotted.path=value
  std::map<std::string, std::string> flags;  // stage subcommand flags by config path
  std::string report;                         // eval run: copy report.json here
};

// A stage subcommand flag that overrides one config field.
struct StageFlag {
  std::string names;  // CLI11 option names
  std::string path;   // dotted config path
  bool is_path;       // resolved against the working directory
  std::string help;
};

std::vector<StageFlag> stage_flags(const std::string& stage) {
  auto in = [&](const std::string& extra, const std::string& key) {
    return StageFlag{"-i,--input" + extra, "stages." + stage + "." + key, true, "Input dataset"};
  };
  if (stage == "screen") return {in("", "input"), {"--signals", "stages.screen.signals", true, "PPL/difficulty signals"}};
  if (stage == "prefgen") return {in(",--questions", "input")};
  if (stage == "dpo_loss") return {in(",--batch", "input"), {"--beta", "stages.dpo_loss.beta", false, "DPO beta"}};
  if (stage == "mine_negatives") return {in(",--chunks", "chunks")};
  if (stage == "select_hard") return {in(",--losses", "losses")};
  if (stage == "iterate") return {in(",--queries", "queries"), {"--chunks", "stages.iterate.chunks", true, "Chunk corpus"}};
  if (stage == "ragsft") return {in(",--chunks", "chunks")};
  if (stage == "eval") {
    return {in(",--model-outputs", "outputs"),
            {"--cases", "stages.eval.cases", true, "Evaluation cases"},
            {"--judge", "roles.entailment_judge", false, "Profile judging statement support"}};
  }
  return {in("", "input")};
}

// "stages.eval.alpha=0.4": the value is parsed as JSON when it can be,
// otherwise taken as a string.
void apply_set(json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw app::ConfigError("--set expects path=value, got '" + assignment + "'");
  std::string path = assignment.substr(0, eq);
  std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    auto dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw app::ConfigError("--set: empty path segment in '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

app::RunConfig load(const Options& o) {
  fs::path path(o.config);
  std::ifstream in(path);
  if (!in) throw app::ConfigError("cannot read config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw app::ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  for (const auto& s : o.sets) apply_set(doc, s);
  fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  app::RunConfig cfg = app::config_from_json(doc, base);
  cfg.source = fs::absolute(path).lexically_normal();
  app::Overrides ov;
  ov.seed = o.seed;
  ov.mock = o.mock;
  if (!o.output_dir.empty()) ov.output_dir = fs::path(o.output_dir);
  app::apply_overrides(cfg, ov);
  return cfg;
}

void print_violations(const std::vector<corpus::Violation>& v) {
  for (const auto& x : v) std::cerr << "  " << (x.field.empty() ? "<root>" : x.field) << ": " << x.message << "\n";
}

int summarize(const app::RunManifest& m) {
  spdlog::info("{}: in={} kept={} removed={} unresolved={} gateway_calls={} ({:.0f} ms) -> {}", m.stage, m.counts.in,
               m.counts.kept, m.counts.removed, m.counts.unresolved, m.gateway.value("total_calls", 0), m.elapsed_ms,
               m.outputs.empty() ? std::string("-") : m.outputs.front().path.parent_path().string());
  return m.counts.unresolved > 0 ? kUnresolved : kOk;
}

// Maps exceptions onto exit codes.
template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const app::ConfigError& e) {
    spdlog::error("{}", e.what());
    print_violations(e.violations());
    return kUsage;
  } catch (const review::ReviewError& e) {
    spdlog::error("review: {}", e.what());
    print_violations(e.violations());
    return e.kind() == review::ReviewError::Kind::invalid ? kUsage : kFailure;
  } catch (const corpus::DatasetError& e) {
    spdlog::error("dataset: {}", e.what());
    return kFailure;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
}

int run_one(Options o, const std::string& stage) {
  for (const auto& f : stage_flags(stage)) {
    auto it = o.flags.find(f.path);
    if (it == o.flags.end() || it->second.empty()) continue;
    std::string value = f.is_path ? json(fs::absolute(it->second).lexically_normal().string()).dump() : it->second;
    o.sets.push_back(f.path + "=" + value);
  }
  return guarded([&] {
    auto m = app::run_stage(stage, load(o));
    if (!o.report.empty()) {
      for (const auto& out : m.outputs) {
        if (out.path.filename() == "report.json") fs::copy_file(out.path, o.report, fs::copy_options::overwrite_existing);
      }
    }
    return summarize(m);
  });
}

review::ReviewServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("pipebench");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App cli{"pipebench: domain LLM data curation, preference generation, retrieval data and evaluation"};
  cli.require_subcommand(1);
  Options o;
  cli.add_option("-c,--config", o.config, "Run configuration (JSON)")->capture_default_str();
  cli.add_option("--seed", o.seed, "Override the run seed");
  cli.add_flag("--mock", o.mock, "Force every backend profile onto the deterministic mock");
  cli.add_option("-o,--output-dir", o.output_dir, "Override output_dir");
  cli.add_option("--set", o.sets, "Override a config field: dotted.path=value (repeatable)");
  cli.add_flag_callback("-q,--quiet", [] { spdlog::set_level(spdlog::level::warn); }, "Only log warnings and errors");

  int code = kOk;
  auto stage_cmd = [&](CLI::App* parent, const std::string& name, const std::string& stage, const std::string& help) {
    auto* sub = parent->add_subcommand(name, help);
    for (const auto& f : stage_flags(stage)) sub->add_option(f.names, o.flags[f.path], f.help + " (" + f.path + ")");
    sub->add_option(stage == "prefgen" ? "--output,--out" : "--output", o.output_dir, "Same as --output-dir");
    if (stage == "eval") sub->add_option("--report", o.report, "Also write the report to this path");
    sub->callback([&, stage] { code = run_one(o, stage); });
  };

  auto* curate = cli.add_subcommand("curate", "Instruction-data curation")->require_subcommand(1);
  stage_cmd(curate, "dedup", "dedup", "simHash band dedup with model adjudication, then embedding dedup");
  stage_cmd(curate, "screen", "screen", "Model quality filter, then CQD banding from PPL/difficulty signals");
  stage_cmd(curate, "distill", "distill", "Complexity enhancement, then multi-teacher CoT distillation");

  auto* pref = cli.add_subcommand("prefgen", "Preference-pair generation")->require_subcommand(1);
  stage_cmd(pref, "run", "prefgen", "Sample, select best/worst, score filter, label and balance");
  stage_cmd(pref, "dpo-loss", "dpo_loss", "DPO loss over a dataset of log-probabilities");

  auto* ret = cli.add_subcommand("retrieve", "Retrieval training data")->require_subcommand(1);
  stage_cmd(ret, "mine-negatives", "mine_negatives", "BM25, cross-domain and adversarial hard negatives");
  stage_cmd(ret, "select-hard", "select_hard", "Highest-loss samples from a training loss report");
  stage_cmd(ret, "iterate", "iterate", "Iterative multi-hop retrieval with coverage analysis");
  stage_cmd(ret, "ragsft", "ragsft", "RAG-SFT records: 5 oracle + 3 random reranked chunks");

  auto* ev = cli.add_subcommand("eval", "Statement-level objective evaluation")->require_subcommand(1);
  stage_cmd(ev, "run", "eval", "Answer precision/recall, weighted score and model ranking");

  auto* rv = cli.add_subcommand("review", "Blind human review service")->require_subcommand(1);
  auto* serve = rv->add_subcommand("serve", "Serve the review HTTP API");
  std::optional<int> port;
  serve->add_option("--port", port, "Override stages.review.port (0 picks a free port)");
  serve->callback([&] {
    code = guarded([&] {
      auto cfg = load(o);
      const json& r = cfg.stage("review");
      review::ReviewStore store(cfg.resolve(r.at("data_dir").get<std::string>()));
      review::ReviewServer server(store);
      int bound = server.bind(r.at("host").get<std::string>(), port.value_or(r.at("port").get<int>()));
      spdlog::info("review service on http://{}:{}", r.at("host").get<std::string>(), bound);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen();
      g_server = nullptr;
      return kOk;
    });
  });

  // Local mirrors of the review endpoints; each prints the endpoint's JSON.
  struct ReviewArgs {
    std::string caseset, reviewer, cases, outputs, session, item, slot, scores;
    std::optional<std::uint64_t> seed;
  } ra;
  auto review_store = [&](const app::RunConfig& cfg) {
    return review::ReviewStore(cfg.resolve(cfg.stage("review").at("data_dir").get<std::string>()));
  };
  auto print = [](const json& j) {
    std::cout << j.dump(2) << "\n";
    return kOk;
  };
  auto* create = rv->add_subcommand("create", "Create a blind session (POST /sessions)");
  create->add_option("--caseset", ra.caseset, "Case set name")->required();
  create->add_option("--reviewer", ra.reviewer, "Opaque reviewer id")->required();
  create->add_option("--cases", ra.cases, "Eval cases (default stages.eval.cases)");
  create->add_option("--outputs", ra.outputs, "Model outputs (default stages.eval.outputs)");
  create->add_option("--session-seed", ra.seed, "Presentation-order seed (default: run seed)");
  create->callback([&] {
    code = guarded([&] {
      auto cfg = load(o);
      const json& ev = cfg.stage("eval");
      auto path = [&](const std::string& flag, const char* key) {
        return flag.empty() ? cfg.resolve(ev.at(key).get<std::string>()) : fs::path(flag);
      };
      json body = {{"caseset", ra.caseset}, {"reviewer", ra.reviewer}, {"seed", ra.seed.value_or(cfg.seed())},
                   {"cases", json::array()}, {"outputs", json::array()}};
      for (const auto& c : corpus::read_dataset<evalengine::EvalCase>(path(ra.cases, "cases")).records) {
        body["cases"].push_back({{"id", c.id}, {"question", c.question}});
      }
      for (const auto& r : corpus::read_dataset<corpus::ResponseRecord>(path(ra.outputs, "outputs")).records) {
        body["outputs"].push_back(
            {{"id", r.id}, {"question_id", r.question_id}, {"model_id", r.model_id}, {"answer_text", r.answer_text}});
      }
      auto store = review_store(cfg);
      return print(review::api::create_session(store, body));
    });
  });
  auto* next = rv->add_subcommand("next", "Current item of a session (GET /sessions/{id}/next)");
  next->add_option("session", ra.session, "Session id")->required();
  next->callback([&] {
    code = guarded([&] {
      auto cfg = load(o);
      return print(review::api::next_item(review_store(cfg), ra.session));
    });
  });
  auto* score = rv->add_subcommand("score", "Submit one slot's scores (POST /sessions/{id}/scores)");
  score->add_option("session", ra.session, "Session id")->required();
  score->add_option("--item", ra.item, "Item id")->required();
  score->add_option("--slot", ra.slot, "Slot label")->required();
  score->add_option("--scores", ra.scores, "JSON object with the six criterion scores")->required();
  score->callback([&] {
    code = guarded([&] {
      auto cfg = load(o);
      json scores;
      try {
        scores = json::parse(ra.scores);
      } catch (const json::parse_error& e) {
        throw app::ConfigError(std::string("--scores is not valid JSON: ") + e.what());
      }
      auto store = review_store(cfg);
      return print(review::api::submit_scores(store, ra.session, {{"item_id", ra.item}, {"slot", ra.slot}, {"scores", scores}}));
    });
  });
  auto* rep = rv->add_subcommand("report", "Aggregate report for a case set (GET /reports/{caseset})");
  rep->add_option("caseset", ra.caseset, "Case set name")->required();
  rep->callback([&] {
    code = guarded([&] {
      auto cfg = load(o);
      return print(review::api::report(review_store(cfg), ra.caseset));
    });
  });
  rv->add_subcommand("rubric", "Print the reviewer rubric (GET /rubric)")->callback([&] { code = print(review::rubric()); });

  cli.add_subcommand("report", "Summarize the run manifests under output_dir")->callback([&] {
    code = guarded([&] {
      std::cout << app::collect_report(load(o)).dump(2) << "\n";
      return kOk;
    });
  });

  auto* conf = cli.add_subcommand("config", "Configuration tools")->require_subcommand(1);
  conf->add_subcommand("validate", "Report every violation with its field path")->callback([&] {
    code = guarded([&] {
      load(o);
      std::cout << "ok: " << o.config << "\n";
      return kOk;
    });
  });
  conf->add_subcommand("defaults", "Print every knob with its default")->callback([&] {
    std::cout << app::default_config().dump(2) << "\n";
  });

  cli.add_subcommand("pipeline", "curate -> prefgen -> ragsft -> eval")->callback([&] {
    code = guarded([&] {
      auto cfg = load(o);
      int worst = kOk;
      for (const auto& s : app::pipeline_stages()) worst = std::max(worst, summarize(app::run_stage(s, cfg)));
      return worst;
    });
  });

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = cli.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  return code;
}

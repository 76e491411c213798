// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/app/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <set>

#include "pipebench/common/parallel.hpp"
#include "pipebench/common/rng.hpp"
#include "pipebench/corpus/dataset.hpp"
#include "pipebench/corpus/json_fields.hpp"
#include "pipebench/curation/dedup.hpp"
#include "pipebench/curation/llm_stages.hpp"
#include "pipebench/curation/scoring.hpp"
#include "pipebench/evalengine/evaluate.hpp"
#include "pipebench/evalengine/reference.hpp"
#include "pipebench/gateway/prompts.hpp"
#include "pipebench/prefgen/dpo.hpp"
#include "pipebench/prefgen/preference.hpp"
#include "pipebench/retrieval/index.hpp"
#include "pipebench/retrieval/iterative.hpp"
#include "pipebench/retrieval/negatives.hpp"
#include "pipebench/retrieval/ragsft.hpp"

namespace pipebench::app {

namespace fs = std::filesystem;
using json = nlohmann::json;
using corpus::ChunkRecord;
using corpus::QuestionRecord;
using corpus::RemovalRecord;
using curation::StageCall;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << body;
    if (!out.flush()) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

json counts_json(const StageCounts& c) {
  return {{"in", c.in}, {"kept", c.kept}, {"removed", c.removed}, {"unresolved", c.unresolved}};
}

json stats_json(const gateway::CallStats& s) {
  return {{"calls", s.calls},
          {"attempts", s.attempts},
          {"failures", s.failures},
          {"peak_in_flight", s.peak_in_flight},
          {"prompt_tokens", s.prompt_tokens},
          {"completion_tokens", s.completion_tokens}};
}

json gateway_json(const gateway::Gateway& gw) {
  json out = {{"profiles", json::object()}, {"tasks", json::object()}, {"total_calls", gw.total_calls()}};
  for (const auto& name : gw.profile_names()) {
    json ops = json::object();
    for (const auto& [op, s] : gw.stats(name)) {
      if (s.calls > 0) ops[op] = stats_json(s);
    }
    if (!ops.empty()) out["profiles"][name] = ops;
  }
  for (auto t : gateway::tasks::all()) {
    auto s = gw.task_stats(t);
    if (s.calls > 0) out["tasks"][std::string(t)] = stats_json(s);
  }
  return out;
}

// Everything one stage body needs.
struct Ctx {
  const RunConfig& cfg;
  const json& params;
  gateway::Gateway& gw;
  const gateway::PromptLibrary& prompts;
  fs::path dir;
  std::uint64_t seed;
  RunManifest& m;

  std::string stage() const { return m.stage; }

  fs::path input(const std::string& key) const {
    const std::string v = params.at(key).get<std::string>();
    const std::string field = "stages." + m.stage + "." + key;
    if (v.empty()) throw ConfigError(field + ": required for stage '" + m.stage + "'", {{field, "required"}});
    if (v.starts_with("@")) {
      fs::path p = stage_dir(cfg, v.substr(1)) / "questions.jsonl";
      if (!fs::exists(p)) {
        throw ConfigError(field + ": stage '" + v.substr(1) + "' has no output yet (" + p.string() + ")",
                          {{field, "upstream output missing"}});
      }
      return p;
    }
    return cfg.resolve(v);
  }

  StageCall call(const std::string& role, double temperature) const {
    return StageCall{gw, prompts, cfg.role(role), temperature, cfg.max_workers()};
  }

  double real(const char* key) const { return params.at(key).get<double>(); }
  long long integer(const char* key) const { return params.at(key).get<long long>(); }

  template <corpus::Record R>
  void write(const std::string& name, const std::vector<R>& records, const std::string& profile = "") {
    fs::path p = dir / (name + ".jsonl");
    corpus::write_dataset(records, p, corpus::ManifestMeta{seed, profile});
    m.outputs.push_back({name, p, records.size()});
  }

  void write_json(const std::string& name, const json& body, std::size_t count) {
    fs::path p = dir / (name + ".json");
    write_text(p, body.dump(2) + "\n");
    m.outputs.push_back({name, p, count});
  }

  template <class Fn>
  auto timed(const std::string& label, Fn&& fn) {
    auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      m.timings_ms[label] = ms_since(t0);
    } else {
      auto r = fn();
      m.timings_ms[label] = ms_since(t0);
      return r;
    }
  }
};

template <corpus::Record R>
std::vector<R> read(const fs::path& p) {
  return corpus::read_dataset<R>(p).records;
}

void append(std::vector<RemovalRecord>& to, std::vector<RemovalRecord> from) {
  for (auto& r : from) to.push_back(std::move(r));
}

void set_counts(Ctx& c, std::size_t in, std::size_t kept, std::size_t removed, std::size_t unresolved) {
  c.m.counts = {in, kept, removed, unresolved};
}

// --- curation --------------------------------------------------------------

void stage_dedup(Ctx& c) {
  auto questions = read<QuestionRecord>(c.input("input"));
  const std::size_t n = questions.size();
  curation::BandThresholds band{c.real("simhash_low"), c.real("simhash_high")};
  auto adjudicator = curation::llm_adjudicator(c.gw, c.prompts, c.cfg.role("adjudicator"), c.real("adjudicator_temperature"));
  auto b = c.timed("simhash", [&] { return curation::simhash_dedup_band(std::move(questions), band, adjudicator); });
  const std::size_t after_band = b.retained.size();
  auto e = c.timed("embedding", [&] {
    return curation::embedding_dedup(std::move(b.retained), c.real("embedding_threshold"), c.gw, c.cfg.role("embedder"),
                                     static_cast<std::size_t>(c.integer("batch_size")));
  });
  c.m.substages["simhash"] = {n, after_band, b.discarded.size(), b.unresolved.size()};
  c.m.substages["embedding"] = {after_band, e.retained.size(), e.discarded.size(), 0};

  std::vector<RemovalRecord> removed = std::move(b.discarded);
  append(removed, std::move(e.discarded));
  c.write("questions", e.retained);
  c.write("removed", removed);
  c.write("unresolved", b.unresolved);
  c.write("decisions", b.log);
  json clusters = json::array();
  for (const auto& cl : e.clusters) {
    clusters.push_back({{"retained_id", cl.retained_id}, {"member_ids", cl.member_ids}, {"max_similarity", cl.max_similarity}});
  }
  c.m.details["clusters"] = clusters;
  set_counts(c, n, e.retained.size(), removed.size(), b.unresolved.size());
}

void stage_screen(Ctx& c) {
  auto questions = read<QuestionRecord>(c.input("input"));
  auto signals = read<curation::SignalsRecord>(c.input("signals"));
  const std::size_t n = questions.size();
  auto f = c.timed("filter", [&] { return curation::llm_question_filter(questions, c.call("filter_judge", c.real("filter_temperature"))); });
  const std::size_t kept = f.kept.size();
  auto s = c.timed("cqd", [&] { return curation::screen_questions(std::move(f.kept), signals, c.real("alpha"), c.real("beta")); });
  c.m.substages["filter"] = {n, kept, f.removed.size(), f.unresolved.size()};
  c.m.substages["cqd"] = {kept, s.screened.size(), s.removed.size(), 0};

  std::vector<RemovalRecord> removed = std::move(f.removed);
  append(removed, std::move(s.removed));
  c.write("questions", s.screened);
  c.write("removed", removed);
  c.write("unresolved", f.unresolved);
  c.m.details["band_counts"] = s.band_counts;
  c.m.details["ppl_min"] = s.ppl_min;
  c.m.details["ppl_max"] = s.ppl_max;
  set_counts(c, n, s.screened.size(), removed.size(), f.unresolved.size());
}

void stage_distill(Ctx& c) {
  auto questions = read<QuestionRecord>(c.input("input"));
  const std::size_t n = questions.size();
  auto e = c.timed("enhance", [&] {
    return curation::complexity_enhance(questions, c.call("rewriter", c.real("rewrite_temperature")), c.cfg.role("complexity_judge"),
                                        static_cast<int>(c.integer("max_rounds")));
  });
  auto d = c.timed("distill", [&] {
    return curation::distill_questions(e.questions, c.cfg.role_list("teachers"), static_cast<int>(c.integer("samples_per_teacher")),
                                       c.call("distill_judge", c.real("judge_temperature")), c.real("teacher_temperature"));
  });
  c.m.substages["enhance"] = {n, e.questions.size(), 0, e.unresolved.size()};
  c.m.substages["distill"] = {e.questions.size(), d.responses.size(), 0, d.undistilled.size()};

  // Downstream preference generation judges against the distilled answer.
  std::map<std::string, const corpus::ResponseRecord*> by_question;
  for (const auto& r : d.responses) by_question[r.question_id] = &r;
  std::vector<QuestionRecord> out;
  for (auto q : e.questions) {
    auto it = by_question.find(q.id);
    if (it == by_question.end()) continue;
    q.reference_answer = it->second->answer_text;
    out.push_back(std::move(q));
  }
  std::vector<RemovalRecord> unresolved = std::move(e.unresolved);
  append(unresolved, std::move(d.undistilled));
  c.write("questions", out);
  c.write("responses", d.responses);
  c.write("chain", e.chain);
  c.write("unresolved", unresolved);
  std::map<std::string, std::size_t> status;
  for (const auto& r : e.chain) {
    if (r.status != curation::EnhanceStatus::continuing) ++status[r.status == curation::EnhanceStatus::converged ? "converged" : "unconverged"];
  }
  c.m.details["enhance_status"] = status;
  set_counts(c, n, out.size(), 0, unresolved.size());
}

// --- preference generation ---------------------------------------------------

void stage_prefgen(Ctx& c) {
  auto questions = read<QuestionRecord>(c.input("input"));
  prefgen::PrefgenParams p;
  p.policy_profile = c.cfg.role("policy");
  p.judge_profile = c.cfg.role("preference_judge");
  p.samples = static_cast<int>(c.integer("samples"));
  p.temperature = c.real("temperature");
  p.judge_temperature = c.real("judge_temperature");
  p.confirm_rounds = static_cast<int>(c.integer("confirm_rounds"));
  p.min_score = c.real("min_score");
  p.labels = c.params.at("labels").get<std::vector<std::string>>();
  p.cap_per_label = static_cast<std::size_t>(c.integer("cap_per_label"));
  p.seed = c.seed;
  p.max_workers = c.cfg.max_workers();
  if (p.labels.empty()) {
    throw ConfigError("stages.prefgen.labels: must name at least one label", {{"stages.prefgen.labels", "must not be empty"}});
  }
  auto r = c.timed("prefgen", [&] { return prefgen::generate_preferences(questions, c.gw, c.prompts, p); });
  for (const auto& [name, s] : r.stages) c.m.substages[name] = {s.in, s.kept, s.removed, s.unresolved};
  std::map<std::string, std::size_t> per_label;
  for (const auto& pair : r.pairs) ++per_label[pair.domain_label.value_or("")];
  c.m.details["label_counts"] = per_label;
  c.write("pairs", r.pairs, p.policy_profile);
  c.write("removed", r.removed);
  c.write("unresolved", r.unresolved);
  set_counts(c, questions.size(), r.pairs.size(), r.removed.size(), r.unresolved.size());
}

void stage_dpo_loss(Ctx& c) {
  auto items = read<prefgen::DpoItem>(c.input("input"));
  const double beta = c.real("beta");
  auto loss = c.timed("loss", [&] { return prefgen::dpo_loss(items, beta); });
  json rows = json::array();
  for (std::size_t i = 0; i < items.size(); ++i) {
    rows.push_back({{"id", items[i].id},
                    {"loss", loss.losses[i]},
                    {"margin", loss.margins[i]},
                    {"preference_probability", loss.preference_probability[i]}});
  }
  c.write_json("loss", {{"beta", beta}, {"mean_loss", loss.mean_loss}, {"items", rows}}, items.size());
  c.m.details["mean_loss"] = loss.mean_loss;
  set_counts(c, items.size(), items.size(), 0, 0);
}

// --- retrieval ---------------------------------------------------------------

void stage_mine_negatives(Ctx& c) {
  auto chunks = read<ChunkRecord>(c.input("chunks"));
  retrieval::Bm25Params bm{c.real("k1"), c.real("b")};
  bm.validate();
  std::vector<retrieval::NegativeSample> samples;
  std::vector<std::string> log;
  auto take = [&](retrieval::MineResult r) {
    for (auto& s : r.samples) samples.push_back(std::move(s));
    for (auto& l : r.log) log.push_back(std::move(l));
  };

  c.timed("bm25", [&] {
    take(retrieval::mine_bm25_negatives_corpus(chunks, c.real("min_overlap"), c.call("relevance_judge", c.real("judge_temperature")), bm));
  });
  c.m.substages["bm25"] = {samples.size(), samples.size(), 0, 0};

  const auto top_m = static_cast<std::size_t>(c.integer("cross_domain_top_m"));
  std::size_t before = samples.size();
  c.timed("cross_domain", [&] {
    std::map<std::string, std::vector<ChunkRecord>> by_sub;
    for (const auto& ch : chunks) {
      if (ch.subdomain) by_sub[*ch.subdomain].push_back(ch);
    }
    if (top_m == 0 || by_sub.size() < 2) return;
    for (const auto& ch : chunks) {
      if (ch.subdomain) take(retrieval::mine_cross_domain_negatives(ch, by_sub, c.gw, c.cfg.role("embedder"), top_m));
    }
  });
  c.m.substages["cross_domain"] = {samples.size() - before, samples.size() - before, 0, 0};

  before = samples.size();
  std::size_t failed = 0;
  c.timed("adversarial", [&] {
    const int k = static_cast<int>(c.integer("adversarial_k"));
    std::map<std::string, const ChunkRecord*> by_id;
    for (const auto& ch : chunks) by_id[ch.id] = &ch;
    for (const auto& id : c.params.at("positives").get<std::vector<std::string>>()) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw ConfigError("stages.mine_negatives.positives: unknown chunk '" + id + "'",
                          {{"stages.mine_negatives.positives", "unknown chunk '" + id + "'"}});
      }
      if (k == 0) continue;
      try {
        take(retrieval::gen_adversarial_negatives(*it->second, c.call("paraphraser", c.real("judge_temperature")), k));
      } catch (const std::exception& e) {
        ++failed;
        log.push_back("adversarial " + id + ": " + e.what());
      }
    }
  });
  c.m.substages["adversarial"] = {samples.size() - before + failed, samples.size() - before, 0, failed};

  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  c.write("negatives", samples);
  c.m.details["log"] = log;
  set_counts(c, samples.size() + failed, samples.size(), 0, failed);
}

void stage_select_hard(Ctx& c) {
  auto entries = read<retrieval::LossEntry>(c.input("losses"));
  auto ids = c.timed("select", [&] {
    return retrieval::select_hard_negatives_by_loss(entries, c.integer("every_n"), c.real("top_fraction"));
  });
  std::map<std::string, const retrieval::LossEntry*> by_id;
  for (const auto& e : entries) by_id[e.id] = &e;
  std::vector<retrieval::LossEntry> selected;
  for (const auto& id : ids) selected.push_back(*by_id.at(id));
  c.write("selected", selected);
  set_counts(c, entries.size(), selected.size(), entries.size() - selected.size(), 0);
}

void stage_iterate(Ctx& c) {
  auto queries = read<QuestionRecord>(c.input("queries"));
  auto chunks = read<ChunkRecord>(c.input("chunks"));
  auto index = c.timed("index", [&] { return retrieval::ChunkIndex::build(std::move(chunks), c.gw, c.cfg.role("embedder")); });
  retrieval::IterativeParams p;
  p.max_iterations = static_cast<int>(c.integer("max_iterations"));
  p.per_round_k = static_cast<std::size_t>(c.integer("per_round_k"));
  p.min_similarity = c.real("min_similarity");
  if (c.params.at("rerank").get<bool>()) p.rerank_profile = c.cfg.role("reranker");
  StageCall analyst = c.call("analyst", c.real("temperature"));
  analyst.max_workers = 1;
  auto results = c.timed("retrieve", [&] {
    return bounded_map(queries.size(), c.cfg.max_workers(),
                       [&](std::size_t i) { return retrieval::iterative_retrieve(queries[i].text, index, analyst, p); });
  });
  std::vector<RetrievalRecord> out;
  std::vector<RemovalRecord> unresolved;
  std::map<std::string, std::size_t> stops;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (!results[i].ok()) {
      std::string what = "unknown error";
      try {
        std::rethrow_exception(results[i].error);
      } catch (const std::exception& e) {
        what = e.what();
      }
      unresolved.push_back({queries[i].id, "iterate", "retrieval_failed", what, json::object()});
      continue;
    }
    const auto& r = *results[i].value;
    RetrievalRecord rec;
    rec.id = queries[i].id;
    rec.query = queries[i].text;
    for (const auto& ch : r.chunks) rec.chunk_ids.push_back(ch.id);
    rec.iterations = static_cast<std::int64_t>(r.trace.iterations.size());
    rec.stop = r.trace.stop == retrieval::StopReason::coverage ? "coverage" : "max_iterations";
    rec.trace = retrieval::to_json(r.trace);
    ++stops[rec.stop];
    out.push_back(std::move(rec));
  }
  c.write("retrievals", out);
  c.write("unresolved", unresolved);
  c.m.details["stop_reasons"] = stops;
  set_counts(c, queries.size(), out.size(), 0, unresolved.size());
}

void stage_ragsft(Ctx& c) {
  auto chunks = read<ChunkRecord>(c.input("chunks"));
  std::map<std::string, std::vector<ChunkRecord>> articles;
  for (const auto& ch : chunks) articles[ch.doc_id].push_back(ch);
  std::vector<std::string> doc_ids;
  for (const auto& [id, _] : articles) doc_ids.push_back(id);

  retrieval::RagSftProfiles profiles{c.cfg.role("generator"), c.cfg.role("reranker"), c.real("temperature")};
  struct Built {
    std::optional<retrieval::RagSftRecord> record;
    std::optional<RemovalRecord> removed, unresolved;
  };
  auto results = c.timed("build", [&] {
    return bounded_map(doc_ids.size(), c.cfg.max_workers(), [&](std::size_t i) {
      const std::string& doc = doc_ids[i];
      Built b;
      try {
        b.record = retrieval::build_ragsft_record(articles.at(doc), chunks, c.gw, c.prompts, profiles,
                                                  derive_seed(c.seed, doc), doc + "/ragsft");
      } catch (const retrieval::RagSftError& e) {
        b.unresolved = RemovalRecord{doc, "ragsft", e.stage(), e.what(), json::object()};
      } catch (const std::invalid_argument& e) {
        b.removed = RemovalRecord{doc, "ragsft", "insufficient_chunks", e.what(), json::object()};
      }
      return b;
    });
  });
  std::vector<retrieval::RagSftRecord> records;
  std::vector<RemovalRecord> removed, unresolved;
  for (auto& r : results) {
    if (!r.ok()) std::rethrow_exception(r.error);
    if (r.value->record) records.push_back(std::move(*r.value->record));
    if (r.value->removed) removed.push_back(std::move(*r.value->removed));
    if (r.value->unresolved) unresolved.push_back(std::move(*r.value->unresolved));
  }
  c.write("ragsft", records, profiles.generator);
  c.write("removed", removed);
  c.write("unresolved", unresolved);
  set_counts(c, doc_ids.size(), records.size(), removed.size(), unresolved.size());
}

// --- evaluation --------------------------------------------------------------

void stage_eval(Ctx& c) {
  auto cases = read<evalengine::EvalCase>(c.input("cases"));
  auto outputs = read<corpus::ResponseRecord>(c.input("outputs"));
  evalengine::EvalWeights w{c.real("alpha"), c.real("beta")};
  const double temp = c.real("temperature");

  if (c.params.at("prepare_reference").get<bool>()) {
    StageCall editor = c.call("reference_editor", temp);
    c.timed("prepare_reference", [&] {
      auto prepared = bounded_map(cases.size(), c.cfg.max_workers(), [&](std::size_t i) {
        auto std_ref = evalengine::standardize_reference({{cases[i].id, cases[i].ground_truth}}, editor);
        return evalengine::refine_reference(std_ref.text, editor).text;
      });
      for (std::size_t i = 0; i < cases.size(); ++i) {
        if (!prepared[i].ok()) std::rethrow_exception(prepared[i].error);
        cases[i].ground_truth = *prepared[i].value;
      }
    });
    c.write("cases", cases);
  }

  const std::string cache_cfg = c.params.at("cache").get<std::string>();
  const fs::path cache_path = cache_cfg.empty() ? c.dir / "statement_cache.jsonl" : c.cfg.resolve(cache_cfg);
  auto cache = evalengine::StatementCache::load(cache_path);
  const std::size_t cached_before = cache.size();
  auto report = c.timed("evaluate", [&] {
    return evalengine::evaluate_all(cases, outputs, c.call("extractor", temp), c.call("entailment_judge", temp), cache, w);
  });
  cache.save(cache_path);
  c.m.outputs.push_back({"statement_cache", cache_path, cache.size()});
  c.write_json("report", evalengine::to_json(report), report.results.size());
  c.m.details["cache_entries_before"] = cached_before;
  c.m.details["cache_entries_after"] = cache.size();
  json summary = json::object();
  for (const auto& [model, s] : report.models) {
    summary[model] = {{"precision", s.mean_precision}, {"recall", s.mean_recall}, {"weighted", s.weighted}};
    if (report.ranking.count(model)) summary[model]["rank"] = report.ranking.at(model);
  }
  c.m.details["models"] = summary;
  const std::size_t incomplete = report.incomplete();
  set_counts(c, report.results.size(), report.results.size() - incomplete, 0, incomplete);
}

using StageFn = void (*)(Ctx&);

const std::map<std::string, StageFn>& stage_table() {
  static const std::map<std::string, StageFn> kTable = {
      {"dedup", stage_dedup},           {"screen", stage_screen},
      {"distill", stage_distill},       {"prefgen", stage_prefgen},
      {"dpo_loss", stage_dpo_loss},     {"mine_negatives", stage_mine_negatives},
      {"select_hard", stage_select_hard}, {"iterate", stage_iterate},
      {"ragsft", stage_ragsft},         {"eval", stage_eval},
  };
  return kTable;
}

}  // namespace

json to_json(const RunManifest& m) {
  json outputs = json::array();
  for (const auto& o : m.outputs) outputs.push_back({{"name", o.name}, {"path", o.path.string()}, {"count", o.count}});
  json sub = json::object();
  for (const auto& [k, v] : m.substages) sub[k] = counts_json(v);
  return {{"stage", m.stage},
          {"seed", m.seed},
          {"stage_seed", m.stage_seed},
          {"elapsed_ms", m.elapsed_ms},
          {"timings_ms", m.timings_ms},
          {"counts", counts_json(m.counts)},
          {"substages", sub},
          {"gateway", m.gateway},
          {"outputs", outputs},
          {"details", m.details},
          {"config", m.config}};
}

void to_json(json& j, const RetrievalRecord& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["query"] = r.query;
  j["chunk_ids"] = r.chunk_ids;
  j["iterations"] = r.iterations;
  j["stop"] = r.stop;
  j["trace"] = r.trace;
}

void from_json(const json& j, RetrievalRecord& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.query = f.text("query");
  r.chunk_ids = f.raw("chunk_ids").get<std::vector<std::string>>();
  r.iterations = f.integer("iterations");
  r.stop = f.text("stop");
  r.trace = f.raw("trace");
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const RetrievalRecord& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  corpus::require_text(v, "query", r.query);
  if (r.iterations < 1) v.push_back({"iterations", "must be >= 1"});
  if (r.stop != "coverage" && r.stop != "max_iterations") v.push_back({"stop", "must be 'coverage' or 'max_iterations'"});
  return v;
}

std::unique_ptr<gateway::Gateway> make_gateway(const RunConfig& cfg) {
  auto gw = std::make_unique<gateway::Gateway>();
  for (auto& [name, p] : cfg.profiles()) {
    auto backend = gateway::make_backend(p);
    gw->add_profile(p, std::move(backend));
  }
  return gw;
}

fs::path stage_dir(const RunConfig& cfg, const std::string& stage) { return cfg.output_dir() / stage; }

RunManifest run_stage(const std::string& stage, const RunConfig& cfg) {
  auto it = stage_table().find(stage);
  if (it == stage_table().end()) {
    std::string names;
    for (const auto& n : stage_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown stage '" + stage + "' (stages: " + names + ")");
  }
  auto t0 = Clock::now();
  auto prompts = gateway::PromptLibrary::load(cfg.prompts_path());
  if (auto missing = prompts.missing_tasks(); !missing.empty()) {
    std::string names;
    for (const auto& n : missing) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("prompts: no template for " + names, {{"prompts", "missing templates: " + names}});
  }
  auto gw = make_gateway(cfg);

  RunManifest m;
  m.stage = stage;
  m.config = cfg.snapshot();
  m.seed = cfg.seed();
  m.stage_seed = derive_seed(cfg.seed(), stage);
  const fs::path dir = stage_dir(cfg, stage);
  fs::create_directories(dir);
  Ctx ctx{cfg, cfg.stage(stage), *gw, prompts, dir, m.stage_seed, m};
  it->second(ctx);
  if (!m.counts.conserved()) {
    throw std::logic_error("stage '" + stage + "' does not conserve records: " + counts_json(m.counts).dump());
  }
  m.gateway = gateway_json(*gw);
  m.elapsed_ms = ms_since(t0);
  write_text(dir / "run_manifest.json", to_json(m).dump(2) + "\n");
  return m;
}

std::vector<RunManifest> run_pipeline(const RunConfig& cfg) {
  std::vector<RunManifest> out;
  for (const auto& s : pipeline_stages()) out.push_back(run_stage(s, cfg));
  return out;
}

json collect_report(const RunConfig& cfg) {
  json stages = json::object();
  for (const auto& s : stage_names()) {
    fs::path p = stage_dir(cfg, s) / "run_manifest.json";
    if (!fs::exists(p)) continue;
    std::ifstream in(p);
    json m = json::parse(in);
    m.erase("config");
    stages[s] = m;
  }
  return {{"output_dir", cfg.output_dir().string()}, {"stages", stages}};
}

}  // namespace pipebench::app

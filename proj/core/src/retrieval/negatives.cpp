// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/retrieval/negatives.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "pipebench/common/parallel.hpp"
#include "pipebench/common/text.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::retrieval {

using nlohmann::json;
namespace reply = gateway::reply;
namespace tasks = gateway::tasks;

void to_json(json& j, const NegativeSample& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["anchor_id"] = r.anchor_id;
  j["negative_id"] = r.negative_id;
  j["negative_kind"] = kNegativeKindNames.name(r.negative_kind);
  if (r.overlap) j["overlap"] = *r.overlap;
  if (r.bm25) j["bm25"] = *r.bm25;
  if (r.similarity) j["similarity"] = *r.similarity;
  if (r.source_id) j["source_id"] = *r.source_id;
  if (r.negative_text) j["negative_text"] = *r.negative_text;
}

void from_json(const json& j, NegativeSample& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.anchor_id = f.text("anchor_id");
  r.negative_id = f.text("negative_id");
  r.negative_kind = f.enumerated("negative_kind", kNegativeKindNames);
  r.overlap = f.opt_real("overlap");
  r.bm25 = f.opt_real("bm25");
  r.similarity = f.opt_real("similarity");
  r.source_id = f.opt_text("source_id");
  r.negative_text = f.opt_text("negative_text");
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const NegativeSample& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  corpus::require_text(v, "anchor_id", r.anchor_id);
  corpus::require_text(v, "negative_id", r.negative_id);
  if (r.anchor_id == r.negative_id) v.push_back({"negative_id", "must differ from anchor_id"});
  switch (r.negative_kind) {
    case NegativeKind::bm25:
      if (!r.overlap) v.push_back({"overlap", "required for bm25 negatives"});
      break;
    case NegativeKind::cross_domain:
      if (!r.similarity) v.push_back({"similarity", "required for cross_domain negatives"});
      break;
    case NegativeKind::adversarial:
      if (!r.source_id) v.push_back({"source_id", "required for adversarial negatives"});
      if (!r.negative_text || text::is_blank(*r.negative_text)) v.push_back({"negative_text", "required for adversarial negatives"});
      break;
  }
  return v;
}

MineResult mine_bm25_negatives(std::span<const corpus::ChunkRecord> document, double min_overlap,
                               const StageCall& judge, const Bm25Params& params) {
  if (document.size() < 3) throw std::invalid_argument("mine_bm25_negatives: document needs >= 3 chunks");
  for (const auto& c : document) {
    if (c.doc_id != document.front().doc_id) throw std::invalid_argument("mine_bm25_negatives: chunks span documents");
  }
  std::vector<const corpus::ChunkRecord*> chunks;
  for (const auto& c : document) chunks.push_back(&c);
  std::sort(chunks.begin(), chunks.end(), [](auto* a, auto* b) {
    return a->position != b->position ? a->position < b->position : a->id < b->id;
  });

  std::vector<std::vector<std::string>> tokens;
  for (auto* c : chunks) tokens.push_back(text::words(c->text));
  const CorpusStats stats = CorpusStats::build(tokens);

  struct Candidate {
    std::size_t a, b;
    double overlap;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    for (std::size_t j = i + 1; j < chunks.size(); ++j) {
      if (std::llabs(chunks[j]->position - chunks[i]->position) < 2) continue;
      const double o = lexical_overlap(chunks[i]->text, chunks[j]->text);
      if (o > min_overlap) candidates.push_back({i, j, o});
    }
  }

  auto verdicts = bounded_map(candidates.size(), judge.max_workers, [&](std::size_t k) {
    const auto& c = candidates[k];
    auto req = judge.prompts.render(tasks::kSemanticRelevance,
                                    {{"first", chunks[c.a]->text}, {"second", chunks[c.b]->text}}, judge.temperature);
    auto v = reply::field(judge.gw.generate(req, judge.profile).text, "VERDICT");
    std::string s = v ? reply::lower(*v) : "";
    if (s != "relevant" && s != "irrelevant") throw std::runtime_error("no relevant/irrelevant VERDICT");
    return s == "irrelevant";
  });

  MineResult out;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    const auto& a = *chunks[c.a];
    const auto& b = *chunks[c.b];
    if (!verdicts[k].ok()) {
      out.log.push_back("skipped " + a.id + "~" + b.id + ": judge failure");
      continue;
    }
    if (!*verdicts[k].value) continue;
    NegativeSample s;
    s.id = a.id + "~" + b.id;
    s.anchor_id = a.id;
    s.negative_id = b.id;
    s.negative_kind = NegativeKind::bm25;
    s.overlap = c.overlap;
    s.bm25 = bm25_score(tokens[c.a], tokens[c.b], stats, params);
    out.samples.push_back(std::move(s));
  }
  return out;
}

MineResult mine_bm25_negatives_corpus(std::span<const corpus::ChunkRecord> chunks, double min_overlap,
                                      const StageCall& judge, const Bm25Params& params) {
  std::map<std::string, std::vector<corpus::ChunkRecord>> docs;
  for (const auto& c : chunks) docs[c.doc_id].push_back(c);
  std::vector<const std::vector<corpus::ChunkRecord>*> order;
  for (const auto& [id, d] : docs) order.push_back(&d);

  StageCall inner = judge;
  inner.max_workers = 1;
  auto results = bounded_map(order.size(), judge.max_workers, [&](std::size_t i) -> std::optional<MineResult> {
    if (order[i]->size() < 3) return std::nullopt;
    return mine_bm25_negatives(*order[i], min_overlap, inner, params);
  });
  MineResult out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::string& doc = order[i]->front().doc_id;
    if (!results[i].ok()) {
      std::rethrow_exception(results[i].error);
    }
    if (!*results[i].value) {
      out.log.push_back("document " + doc + ": fewer than 3 chunks, skipped");
      continue;
    }
    for (auto& s : (*results[i].value)->samples) out.samples.push_back(std::move(s));
    for (auto& l : (*results[i].value)->log) out.log.push_back(std::move(l));
  }
  return out;
}

MineResult mine_cross_domain_negatives(const corpus::ChunkRecord& query,
                                       const std::map<std::string, std::vector<corpus::ChunkRecord>>& corpora,
                                       gateway::Gateway& gw, const std::string& embed_profile, std::size_t top_m) {
  if (!query.subdomain || text::is_blank(*query.subdomain)) {
    throw std::invalid_argument("mine_cross_domain_negatives: query subdomain unknown");
  }
  if (corpora.size() < 2) throw std::invalid_argument("mine_cross_domain_negatives: need >= 2 subdomains");
  MineResult out;
  if (top_m == 0) return out;

  std::vector<const corpus::ChunkRecord*> pool;
  std::vector<const std::string*> pool_sub;
  for (const auto& [sub, chunks] : corpora) {
    for (const auto& c : chunks) {
      if (c.subdomain && *c.subdomain != sub) {
        throw std::invalid_argument("chunk " + c.id + " labeled '" + *c.subdomain + "' filed under '" + sub + "'");
      }
      if (sub != *query.subdomain) {
        pool.push_back(&c);
        pool_sub.push_back(&sub);
      }
    }
  }
  if (pool.empty()) return out;
  std::vector<std::string> texts{query.text};
  for (auto* c : pool) texts.push_back(c->text);
  auto vecs = gw.embed(texts, embed_profile);

  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < pool.size(); ++i) scored.emplace_back(gateway::cosine(vecs[0], vecs[i + 1]), i);
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : pool[a.second]->id < pool[b.second]->id;
  });
  if (scored.size() > top_m) scored.resize(top_m);
  for (const auto& [sim, i] : scored) {
    const corpus::ChunkRecord* c = pool[i];
    NegativeSample s;
    s.id = query.id + "~" + c->id;
    s.anchor_id = query.id;
    s.negative_id = c->id;
    s.negative_kind = NegativeKind::cross_domain;
    s.similarity = sim;
    s.extra["subdomain"] = *pool_sub[i];
    out.samples.push_back(std::move(s));
  }
  return out;
}

MineResult gen_adversarial_negatives(const corpus::ChunkRecord& positive, const StageCall& paraphraser, int k) {
  if (k < 1) throw std::invalid_argument("gen_adversarial_negatives: k must be >= 1");
  auto outcomes = bounded_map(static_cast<std::size_t>(k), paraphraser.max_workers, [&](std::size_t i) {
    auto req = paraphraser.prompts.render(tasks::kParaphrase, {{"text", positive.text}, {"index", std::to_string(i)}},
                                          paraphraser.temperature, static_cast<std::int64_t>(i));
    auto p = reply::tail(paraphraser.gw.generate(req, paraphraser.profile).text, "PARAPHRASE");
    if (!p || text::is_blank(*p)) throw std::runtime_error("no PARAPHRASE in output");
    std::string t = text::trim(*p);
    if (t == positive.text) throw std::runtime_error("paraphrase identical to source");
    return t;
  });
  MineResult out;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].ok()) continue;
    NegativeSample s;
    s.negative_id = positive.id + "/adv" + std::to_string(i);
    s.id = positive.id + "~" + s.negative_id;
    s.anchor_id = positive.id;
    s.negative_kind = NegativeKind::adversarial;
    s.source_id = positive.id;
    s.negative_text = *outcomes[i].value;
    out.samples.push_back(std::move(s));
  }
  if (out.samples.size() < static_cast<std::size_t>(k)) {
    out.log.push_back(positive.id + ": generated " + std::to_string(out.samples.size()) + " of " + std::to_string(k));
  }
  return out;
}

void to_json(json& j, const LossEntry& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["step"] = r.step;
  j["loss"] = r.loss;
}

void from_json(const json& j, LossEntry& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.step = f.integer("step");
  r.loss = f.real("loss");
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const LossEntry& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  if (r.step < 0) v.push_back({"step", "must be >= 0"});
  if (!std::isfinite(r.loss)) v.push_back({"loss", "must be finite"});
  return v;
}

std::vector<std::string> select_hard_negatives_by_loss(std::span<const LossEntry> report, std::int64_t every_n,
                                                       double top_fraction) {
  if (every_n < 1) throw std::invalid_argument("select_hard_negatives_by_loss: every_n must be >= 1");
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
    throw std::invalid_argument("select_hard_negatives_by_loss: top_fraction must be in (0, 1]");
  }
  if (report.empty()) return {};
  const std::int64_t step = report.front().step;
  for (const auto& e : report) {
    if (e.step != step) throw std::invalid_argument("select_hard_negatives_by_loss: report mixes steps");
    if (!std::isfinite(e.loss)) throw std::invalid_argument("select_hard_negatives_by_loss: non-finite loss for " + e.id);
  }
  if (step <= 0 || step % every_n != 0) {
    throw std::invalid_argument("select_hard_negatives_by_loss: step " + std::to_string(step) +
                                " is not a multiple of " + std::to_string(every_n));
  }
  std::vector<const LossEntry*> sorted;
  for (const auto& e : report) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->loss != b->loss ? a->loss > b->loss : a->id < b->id; });
  const auto count = static_cast<std::size_t>(std::floor(top_fraction * static_cast<double>(report.size()) + 1e-9));
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(sorted[i]->id);
  return out;
}

}  // namespace pipebench::retrieval

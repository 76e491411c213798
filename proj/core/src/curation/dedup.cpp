// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/curation/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pipebench/curation/simhash.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::curation {

using nlohmann::json;

void to_json(json& j, const DedupDecision& d) {
  j = corpus::with_extra(d.extra);
  j["id"] = d.id;
  j["earlier_id"] = d.earlier_id;
  j["later_id"] = d.later_id;
  j["similarity"] = d.similarity;
  j["action"] = kDedupActionNames.name(d.action);
  if (d.outcome) j["outcome"] = *d.outcome == Adjudication::duplicate ? "duplicate" : "distinct";
}

void from_json(const json& j, DedupDecision& d) {
  corpus::FieldReader f(j);
  d.id = f.text("id");
  d.earlier_id = f.text("earlier_id");
  d.later_id = f.text("later_id");
  d.similarity = f.real("similarity");
  d.action = f.enumerated("action", kDedupActionNames);
  if (auto o = f.opt_text("outcome")) {
    if (*o == "duplicate") d.outcome = Adjudication::duplicate;
    else if (*o == "distinct") d.outcome = Adjudication::distinct;
    else corpus::FieldReader::fail("outcome", "unknown value '" + *o + "'");
  }
  d.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const DedupDecision& d) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", d.id);
  corpus::require_text(v, "earlier_id", d.earlier_id);
  corpus::require_text(v, "later_id", d.later_id);
  if (!(d.similarity >= 0.0 && d.similarity <= 1.0)) v.push_back({"similarity", "must be in [0, 1]"});
  return v;
}

namespace {

std::string format_sim(double s) {
  std::ostringstream out;
  out.precision(6);
  out << s;
  return out.str();
}

void sort_by_id(std::vector<QuestionRecord>& q) {
  std::sort(q.begin(), q.end(), [](const QuestionRecord& a, const QuestionRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i].id == q[i - 1].id) throw std::invalid_argument("duplicate question id '" + q[i].id + "'");
  }
}

}  // namespace

BandDedupResult simhash_dedup_band(std::vector<QuestionRecord> questions, BandThresholds t,
                                   const Adjudicator& adjudicator) {
  if (!(t.low < t.high) || t.low < 0.0 || t.high > 1.0) {
    throw std::invalid_argument("simhash_dedup_band: need 0 <= low < high <= 1");
  }
  sort_by_id(questions);
  for (auto& q : questions) {
    if (!q.simhash) q.simhash = simhash64(q.text).bits;
  }

  BandDedupResult out;
  for (auto& q : questions) {
    const SimhashFingerprint fq{*q.simhash};
    enum class Fate { keep, discard, unresolved } fate = Fate::keep;
    std::string detail;
    for (const auto& r : out.retained) {
      const double sim = simhash_similarity(SimhashFingerprint{*r.simhash}, fq);
      if (sim < t.low) continue;
      DedupDecision d;
      d.id = q.id + "~" + r.id;
      d.earlier_id = r.id;
      d.later_id = q.id;
      d.similarity = sim;
      if (sim > t.high) {
        d.action = DedupAction::discard_one;
        fate = Fate::discard;
        detail = "simhash similarity " + format_sim(sim) + " with " + r.id;
      } else {
        d.action = DedupAction::adjudicate_llm;
        try {
          d.outcome = adjudicator(r, q, sim);
        } catch (const std::exception& e) {
          fate = Fate::unresolved;
          detail = "adjudication failed against " + r.id + ": " + e.what();
        }
        if (d.outcome == Adjudication::duplicate) {
          fate = Fate::discard;
          detail = "adjudicated duplicate of " + r.id + " (similarity " + format_sim(sim) + ")";
        }
      }
      out.log.push_back(std::move(d));
      if (fate != Fate::keep) break;
    }
    switch (fate) {
      case Fate::keep: out.retained.push_back(std::move(q)); break;
      case Fate::discard: out.discarded.push_back({q.id, "simhash_dedup", "near_duplicate", detail, json::object()}); break;
      case Fate::unresolved:
        out.unresolved.push_back({q.id, "simhash_dedup", "adjudication_failed", detail, json::object()});
        break;
    }
  }
  return out;
}

Adjudicator llm_adjudicator(gateway::Gateway& gw, const gateway::PromptLibrary& prompts, std::string profile,
                            double temperature) {
  return [&gw, &prompts, profile = std::move(profile), temperature](const QuestionRecord& a, const QuestionRecord& b,
                                                                     double sim) {
    auto req = prompts.render(gateway::tasks::kDedupAdjudicate,
                              {{"first", a.text}, {"second", b.text}, {"similarity", format_sim(sim)}}, temperature);
    auto g = gw.generate(req, profile);
    auto verdict = gateway::reply::field(g.text, "VERDICT");
    if (verdict) {
      std::string v = gateway::reply::lower(*verdict);
      if (v == "duplicate") return Adjudication::duplicate;
      if (v == "distinct") return Adjudication::distinct;
    }
    throw std::runtime_error("unparseable adjudication verdict");
  };
}

EmbeddingDedupResult embedding_dedup(std::vector<QuestionRecord> questions, double threshold, gateway::Gateway& gw,
                                     std::string_view profile, std::size_t batch_size) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("embedding_dedup: threshold must be in (0, 1]");
  if (batch_size == 0) batch_size = 1;
  sort_by_id(questions);
  const std::size_t n = questions.size();

  std::vector<gateway::EmbeddingVec> vecs;
  vecs.reserve(n);
  for (std::size_t start = 0; start < n; start += batch_size) {
    std::vector<std::string> texts;
    for (std::size_t i = start; i < std::min(n, start + batch_size); ++i) texts.push_back(questions[i].text);
    auto batch = gw.embed(texts, profile);
    for (auto& v : batch) vecs.push_back(std::move(v));
  }

  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<double> best(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = gateway::cosine(vecs[i], vecs[j]);
      if (c > threshold) {
        adj[i].push_back(j);
        adj[j].push_back(i);
        best[i] = std::max(best[i], c);
        best[j] = std::max(best[j], c);
      }
    }
  }

  // Components by BFS; visiting in ascending-id order makes the first member
  // of each component its smallest id.
  EmbeddingDedupResult out;
  std::vector<int> seen(n, 0);
  std::vector<std::size_t> component_of(n, 0);
  std::vector<DuplicateCluster> clusters;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> members{s};
    seen[s] = 1;
    for (std::size_t k = 0; k < members.size(); ++k) {
      for (std::size_t nb : adj[members[k]]) {
        if (!seen[nb]) {
          seen[nb] = 1;
          members.push_back(nb);
        }
      }
    }
    std::sort(members.begin(), members.end());
    DuplicateCluster c;
    c.retained_id = questions[members.front()].id;
    for (std::size_t m : members) {
      c.member_ids.push_back(questions[m].id);
      c.max_similarity = std::max(c.max_similarity, best[m]);
      component_of[m] = clusters.size();
    }
    clusters.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = clusters[component_of[i]];
    if (c.retained_id == questions[i].id) {
      out.retained.push_back(std::move(questions[i]));
    } else {
      out.discarded.push_back({questions[i].id, "embedding_dedup", "near_duplicate",
                               "cosine cluster represented by " + c.retained_id, json::object()});
    }
  }
  for (auto& c : clusters) {
    if (c.member_ids.size() > 1) out.clusters.push_back(std::move(c));
  }
  return out;
}

}  // namespace pipebench::curation

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/curation/llm_stages.hpp"
#include "pipebench/retrieval/bm25.hpp"

namespace pipebench::retrieval {

using curation::StageCall;

enum class NegativeKind { bm25, cross_domain, adversarial };

inline constexpr corpus::EnumNames<NegativeKind, 3> kNegativeKindNames{{{
    {NegativeKind::bm25, "bm25"},
    {NegativeKind::cross_domain, "cross_domain"},
    {NegativeKind::adversarial, "adversarial"},
}}};

/// A training negative for an anchor (query or positive chunk). Evidence is
/// kind-specific: overlap (bm25), similarity (cross_domain), or the source
/// chunk plus generated text (adversarial).
struct NegativeSample {
  static constexpr std::string_view kind = "negative_sample";

  std::string id;
  std::string anchor_id;
  std::string negative_id;
  NegativeKind negative_kind = NegativeKind::bm25;
  std::optional<double> overlap;
  std::optional<double> bm25;
  std::optional<double> similarity;
  std::optional<std::string> source_id;
  std::optional<std::string> negative_text;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const NegativeSample&) const = default;
};

void to_json(nlohmann::json& j, const NegativeSample& r);
void from_json(const nlohmann::json& j, NegativeSample& r);
std::vector<corpus::Violation> validate_record(const NegativeSample& r);

struct MineResult {
  std::vector<NegativeSample> samples;
  std::vector<std::string> log;  // skipped candidates and short counts
};

/// Same-document pairs that are non-adjacent (|position delta| >= 2) with
/// lexical overlap > min_overlap and that the judge calls semantically
/// irrelevant. The earlier-position chunk is the anchor.
MineResult mine_bm25_negatives(std::span<const corpus::ChunkRecord> document, double min_overlap,
                               const StageCall& judge, const Bm25Params& params = {});

/// Runs mine_bm25_negatives per document (grouped by doc_id, documents with
/// fewer than 3 chunks skipped) and merges in doc id order.
MineResult mine_bm25_negatives_corpus(std::span<const corpus::ChunkRecord> chunks, double min_overlap,
                                      const StageCall& judge, const Bm25Params& params = {});

/// Most similar chunks from every other subdomain, by embedding cosine.
MineResult mine_cross_domain_negatives(const corpus::ChunkRecord& query,
                                       const std::map<std::string, std::vector<corpus::ChunkRecord>>& corpora,
                                       gateway::Gateway& gw, const std::string& embed_profile, std::size_t top_m);

/// k paraphrase-perturbed variants of a positive chunk.
MineResult gen_adversarial_negatives(const corpus::ChunkRecord& positive, const StageCall& paraphraser, int k);

/// Per-sample training loss reported at some step.
struct LossEntry {
  static constexpr std::string_view kind = "loss_entry";

  std::string id;  // sample id
  std::int64_t step = 0;
  double loss = 0.0;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const LossEntry&) const = default;
};

void to_json(nlohmann::json& j, const LossEntry& r);
void from_json(const nlohmann::json& j, LossEntry& r);
std::vector<corpus::Violation> validate_record(const LossEntry& r);

/// Ids of the floor(top_fraction * n) highest-loss samples (ties by id).
/// Throws std::invalid_argument unless every entry sits at the same positive
/// multiple of every_n.
std::vector<std::string> select_hard_negatives_by_loss(std::span<const LossEntry> report, std::int64_t every_n,
                                                       double top_fraction);

}  // namespace pipebench::retrieval

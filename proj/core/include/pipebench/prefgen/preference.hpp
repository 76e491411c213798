// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"
#include "pipebench/curation/llm_stages.hpp"

namespace pipebench::prefgen {

using curation::StageCall;

enum class PresentationOrder { left_first, right_first };

/// One confirmation comparison. `left` is the response shown first (slot A).
struct PairwiseVerdict {
  std::string left_id;
  std::string right_id;
  std::string winner_id;
  PresentationOrder order = PresentationOrder::left_first;  // left_first: chosen shown as A
  std::int64_t round = 0;

  bool operator==(const PairwiseVerdict&) const = default;
};

struct PreferencePair {
  static constexpr std::string_view kind = "preference_pair";

  std::string id;  // question id
  std::string question_id;
  std::string question_text;
  std::string reference_answer;
  corpus::ResponseRecord chosen;
  corpus::ResponseRecord rejected;
  std::optional<double> chosen_score;  // 0..10, set by the absolute filter
  std::optional<std::string> domain_label;
  std::vector<PairwiseVerdict> trail;
  // Slots for an external trainer to fill; see DpoItem.
  std::optional<double> logp_policy_chosen, logp_policy_rejected, logp_ref_chosen, logp_ref_rejected;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const PreferencePair&) const = default;
};

void to_json(nlohmann::json& j, const PreferencePair& r);
void from_json(const nlohmann::json& j, PreferencePair& r);
std::vector<corpus::Violation> validate_record(const PreferencePair& r);

struct CandidateSet {
  std::string question_id;
  std::string question_text;
  std::string reference_answer;
  std::vector<corpus::ResponseRecord> responses;
};

struct SampleOutcome {
  std::optional<CandidateSet> set;  // empty when fewer than 2 generations succeeded
  std::vector<std::string> failures;
};

/// n samples at the given temperature; sample i uses seed i.
SampleOutcome sample_candidates(const corpus::QuestionRecord& question, const StageCall& policy, int n,
                                double temperature);

enum class SelectStatus { retained, inconsistent, unresolved };

struct SelectOutcome {
  SelectStatus status = SelectStatus::unresolved;
  std::optional<PreferencePair> pair;  // set for retained and inconsistent
  std::string detail;
};

/// Judge ranks all candidates against the reference (best first); then best
/// vs worst is re-judged confirm_rounds times with the presentation order
/// alternating from a seeded starting side. Retained iff best wins a strict
/// majority.
SelectOutcome select_best_worst(const CandidateSet& set, const StageCall& judge, int confirm_rounds,
                                std::uint64_t seed);

struct FilterOutcome {
  std::vector<PreferencePair> retained;
  std::vector<corpus::RemovalRecord> discarded;
  std::vector<corpus::RemovalRecord> unresolved;
};

/// Scores each chosen response on a 10-point scale; retained iff score >=
/// min_score. The score is recorded on every scored pair.
FilterOutcome absolute_score_filter(std::vector<PreferencePair> pairs, const StageCall& judge, double min_score);

/// Labels each pair's question from the label set. Replies outside the set are
/// unresolved.
FilterOutcome label_domains(std::vector<PreferencePair> pairs, const StageCall& judge,
                            const std::vector<std::string>& labels);

/// At most `cap` pairs per label, picked by ascending pair id. Throws
/// std::invalid_argument listing unlabeled (or out-of-set) pair ids.
FilterOutcome domain_balance(std::vector<PreferencePair> pairs, const std::vector<std::string>& labels,
                             std::size_t cap);

struct PrefgenParams {
  std::string policy_profile;
  std::string judge_profile;
  int samples = 4;
  double temperature = 0.9;
  double judge_temperature = 0.0;
  int confirm_rounds = 2;
  double min_score = 6.0;
  std::vector<std::string> labels;
  std::size_t cap_per_label = 1000;
  std::uint64_t seed = 0;
  std::size_t max_workers = 4;
};

struct StageCount {
  std::size_t in = 0, kept = 0, removed = 0, unresolved = 0;
};

struct PrefgenResult {
  std::vector<PreferencePair> pairs;  // ascending question id
  std::vector<corpus::RemovalRecord> removed;
  std::vector<corpus::RemovalRecord> unresolved;
  std::map<std::string, StageCount> stages;
};

/// The whole preference flow: sample, select best/worst, absolute score filter,
/// domain labelling and balancing. Questions need a reference answer.
PrefgenResult generate_preferences(const std::vector<corpus::QuestionRecord>& questions, gateway::Gateway& gw,
                                   const gateway::PromptLibrary& prompts, const PrefgenParams& params);

}  // namespace pipebench::prefgen

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pipebench/corpus/records.hpp"

namespace pipebench::prefgen {

/// Log-probabilities of the chosen (w) and rejected (l) responses under the
/// policy and the frozen reference model.
struct DpoItem {
  static constexpr std::string_view kind = "dpo_item";

  std::string id;
  double logp_policy_chosen = 0.0;
  double logp_policy_rejected = 0.0;
  double logp_ref_chosen = 0.0;
  double logp_ref_rejected = 0.0;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const DpoItem&) const = default;
};

void to_json(nlohmann::json& j, const DpoItem& r);
void from_json(const nlohmann::json& j, DpoItem& r);
std::vector<corpus::Violation> validate_record(const DpoItem& r);

struct DpoLoss {
  double mean_loss = 0.0;
  std::vector<double> losses;                  // -log sigmoid(margin)
  std::vector<double> margins;                 // beta * implicit reward difference
  std::vector<double> preference_probability;  // sigmoid(margin)
};

/// Numerically stable sigmoid and -log sigmoid.
double sigmoid(double x);
double neg_log_sigmoid(double x);

/// Throws std::invalid_argument on an empty batch, beta <= 0 or a
/// non-finite log-probability.
DpoLoss dpo_loss(std::span<const DpoItem> batch, double beta);

/// d(mean loss)/d(field) per item, in field order (policy_chosen,
/// policy_rejected, ref_chosen, ref_rejected).
std::vector<std::array<double, 4>> dpo_gradient(std::span<const DpoItem> batch, double beta);

}  // namespace pipebench::prefgen

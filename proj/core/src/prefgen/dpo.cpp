// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/prefgen/dpo.hpp"

#include <cmath>
#include <stdexcept>

namespace pipebench::prefgen {

using nlohmann::json;

void to_json(json& j, const DpoItem& r) {
  j = corpus::with_extra(r.extra);
  j["id"] = r.id;
  j["logp_policy_chosen"] = r.logp_policy_chosen;
  j["logp_policy_rejected"] = r.logp_policy_rejected;
  j["logp_ref_chosen"] = r.logp_ref_chosen;
  j["logp_ref_rejected"] = r.logp_ref_rejected;
}

void from_json(const json& j, DpoItem& r) {
  corpus::FieldReader f(j);
  r.id = f.text("id");
  r.logp_policy_chosen = f.real("logp_policy_chosen");
  r.logp_policy_rejected = f.real("logp_policy_rejected");
  r.logp_ref_chosen = f.real("logp_ref_chosen");
  r.logp_ref_rejected = f.real("logp_ref_rejected");
  r.extra = f.rest();
}

std::vector<corpus::Violation> validate_record(const DpoItem& r) {
  std::vector<corpus::Violation> v;
  corpus::require_text(v, "id", r.id);
  auto check = [&](const char* name, double x) {
    if (!std::isfinite(x)) v.push_back({name, "must be finite"});
  };
  check("logp_policy_chosen", r.logp_policy_chosen);
  check("logp_policy_rejected", r.logp_policy_rejected);
  check("logp_ref_chosen", r.logp_ref_chosen);
  check("logp_ref_rejected", r.logp_ref_rejected);
  return v;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -log sigmoid(x) = softplus(-x) = max(-x, 0) + log1p(exp(-|x|))
double neg_log_sigmoid(double x) { return std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

namespace {

void check_batch(std::span<const DpoItem> batch, double beta) {
  if (batch.empty()) throw std::invalid_argument("dpo: empty batch");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("dpo: beta must be finite and > 0");
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& it = batch[i];
    if (!std::isfinite(it.logp_policy_chosen) || !std::isfinite(it.logp_policy_rejected) ||
        !std::isfinite(it.logp_ref_chosen) || !std::isfinite(it.logp_ref_rejected)) {
      throw std::invalid_argument("dpo: item " + std::to_string(i) + " has a non-finite log-probability");
    }
  }
}

double margin(const DpoItem& it, double beta) {
  return beta * ((it.logp_policy_chosen - it.logp_ref_chosen) - (it.logp_policy_rejected - it.logp_ref_rejected));
}

}  // namespace

DpoLoss dpo_loss(std::span<const DpoItem> batch, double beta) {
  check_batch(batch, beta);
  DpoLoss out;
  double sum = 0.0;
  for (const auto& it : batch) {
    const double d = margin(it, beta);
    const double l = neg_log_sigmoid(d);
    out.margins.push_back(d);
    out.losses.push_back(l);
    out.preference_probability.push_back(sigmoid(d));
    sum += l;
  }
  out.mean_loss = sum / static_cast<double>(batch.size());
  return out;
}

std::vector<std::array<double, 4>> dpo_gradient(std::span<const DpoItem> batch, double beta) {
  check_batch(batch, beta);
  const double n = static_cast<double>(batch.size());
  std::vector<std::array<double, 4>> out;
  out.reserve(batch.size());
  for (const auto& it : batch) {
    // dL/dΔ = -σ(-Δ); dΔ/d(field) = ±β
    const double g = beta * sigmoid(-margin(it, beta)) / n;
    out.push_back({-g, g, g, -g});
  }
  return out;
}

}  // namespace pipebench::prefgen

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pipebench/common/rng.hpp"
#include "pipebench/common/text.hpp"
#include "pipebench/curation/dedup.hpp"
#include "pipebench/corpus/records.hpp"
#include "test_support.hpp"

namespace pipebench::testing {

/// Reference values generated by tests/oracles/generate.py.
inline nlohmann::json oracle(const std::string& name) {
  std::ifstream in(source_dir() / "tests" / "oracles" / name);
  if (!in) throw std::runtime_error("missing oracle file " + name);
  return nlohmann::json::parse(in);
}

inline double word_jaccard(const std::string& a, const std::string& b) {
  auto wa = text::words(a), wb = text::words(b);
  std::set<std::string> sa(wa.begin(), wa.end()), sb(wb.begin(), wb.end());
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

inline std::vector<corpus::QuestionRecord> oracle_questions(const nlohmann::json& corpus, bool with_fingerprints) {
  std::vector<corpus::QuestionRecord> out;
  for (const auto& r : corpus["records"]) {
    corpus::QuestionRecord q;
    q.id = r["id"];
    q.text = r["text"];
    if (with_fingerprints) q.simhash = text::parse_hex64(r["simhash"].get<std::string>());
    out.push_back(q);
  }
  return out;
}

/// Band adjudicator standing in for the model: duplicate iff word Jaccard
/// reaches `min_jaccard`.
inline curation::Adjudicator jaccard_adjudicator(double min_jaccard) {
  return [min_jaccard](const corpus::QuestionRecord& a, const corpus::QuestionRecord& b, double) {
    return word_jaccard(a.text, b.text) >= min_jaccard ? curation::Adjudication::duplicate
                                                       : curation::Adjudication::distinct;
  };
}

/// Seeded questions where about half are light edits of an earlier base
/// question (0-3 substituted words).
inline std::vector<corpus::QuestionRecord> synthetic_near_duplicates(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> vocab = {
      "oled", "lcd", "tft", "pixel", "panel", "backplane", "luminance", "aging", "mobility", "threshold",
      "voltage", "cathode", "anode", "emission", "lifetime", "gamut", "contrast", "refresh", "driver", "polarizer",
      "substrate", "glass", "hinge", "crease", "touch", "sensor", "yield", "defect", "laser", "oxide",
      "igzo", "ltps", "mask", "inkjet", "quantum", "dot", "micro", "transfer", "bonding", "efficiency"};
  DeterministicRng rng(seed);
  std::vector<std::vector<std::string>> bases;
  std::vector<corpus::QuestionRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> words;
    if (!bases.empty() && rng.below(100) < 50) {
      words = bases[rng.below(bases.size())];
      auto edits = rng.below(4);
      for (std::uint64_t e = 0; e < edits; ++e) words[rng.below(words.size())] = vocab[rng.below(vocab.size())];
    } else {
      auto len = 12 + rng.below(10);
      for (std::uint64_t k = 0; k < len; ++k) words.push_back(vocab[rng.below(vocab.size())]);
      bases.push_back(words);
    }
    corpus::QuestionRecord q;
    for (const auto& w : words) q.text += (q.text.empty() ? "" : " ") + w;
    char id[32];
    std::snprintf(id, sizeof id, "e%03zu", i);
    q.id = id;
    out.push_back(std::move(q));
  }
  return out;
}

/// Plain union-find over an explicit edge predicate; the smallest index of
/// each component is its representative.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace pipebench::testing

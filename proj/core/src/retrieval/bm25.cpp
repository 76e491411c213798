// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/retrieval/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "pipebench/common/text.hpp"

namespace pipebench::retrieval {

void Bm25Params::validate() const {
  if (!(k1 > 0.0) || !std::isfinite(k1)) throw std::invalid_argument("bm25: k1 must be > 0");
  if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("bm25: b must be in [0, 1]");
}

CorpusStats CorpusStats::build(std::span<const std::vector<std::string>> docs) {
  if (docs.empty()) throw std::invalid_argument("bm25: empty corpus");
  CorpusStats s;
  s.doc_count = docs.size();
  std::size_t total = 0;
  for (const auto& d : docs) {
    total += d.size();
    std::set<std::string_view> uniq(d.begin(), d.end());
    for (auto t : uniq) ++s.doc_freq[std::string(t)];
  }
  s.avg_doc_len = static_cast<double>(total) / static_cast<double>(docs.size());
  return s;
}

CorpusStats CorpusStats::from_texts(std::span<const std::string> texts) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(texts.size());
  for (const auto& t : texts) docs.push_back(text::words(t));
  return build(docs);
}

double CorpusStats::idf(std::string_view term) const {
  auto it = doc_freq.find(term);
  const double df = it == doc_freq.end() ? 0.0 : static_cast<double>(it->second);
  const double n = static_cast<double>(doc_count);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_score(std::span<const std::string> query_terms, std::span<const std::string> doc_terms,
                  const CorpusStats& stats, const Bm25Params& params) {
  params.validate();
  if (stats.doc_count == 0) throw std::invalid_argument("bm25: empty corpus");
  std::map<std::string_view, std::size_t> tf;
  for (const auto& t : doc_terms) ++tf[t];
  const double len_norm =
      stats.avg_doc_len > 0.0 ? static_cast<double>(doc_terms.size()) / stats.avg_doc_len : 0.0;
  double score = 0.0;
  for (const auto& q : query_terms) {
    auto it = tf.find(q);
    if (it == tf.end()) continue;
    const double f = static_cast<double>(it->second);
    score += stats.idf(q) * f * (params.k1 + 1.0) / (f + params.k1 * (1.0 - params.b + params.b * len_norm));
  }
  return score;
}

double lexical_overlap(std::string_view a, std::string_view b) {
  auto wa = text::words(a);
  auto wb = text::words(b);
  if (wa.empty() || wb.empty()) throw std::invalid_argument("lexical_overlap: empty input");
  std::sort(wa.begin(), wa.end());
  std::sort(wb.begin(), wb.end());
  std::vector<std::string> common;
  std::set_intersection(wa.begin(), wa.end(), wb.begin(), wb.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(std::min(wa.size(), wb.size()));
}

}  // namespace pipebench::retrieval

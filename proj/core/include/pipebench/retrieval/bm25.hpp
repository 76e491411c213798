// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pipebench::retrieval {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;

  void validate() const;  // throws std::invalid_argument
};

/// Document frequencies and average length over a tokenized corpus.
struct CorpusStats {
  std::size_t doc_count = 0;
  double avg_doc_len = 0.0;
  std::map<std::string, std::size_t, std::less<>> doc_freq;

  /// Throws std::invalid_argument on an empty corpus.
  static CorpusStats build(std::span<const std::vector<std::string>> docs);
  static CorpusStats from_texts(std::span<const std::string> texts);

  /// ln(1 + (N - df + 0.5) / (df + 0.5)); never negative.
  double idf(std::string_view term) const;
};

/// Okapi BM25 of a tokenized document for the given query terms (each
/// occurrence of a repeated query term contributes once).
double bm25_score(std::span<const std::string> query_terms, std::span<const std::string> doc_terms,
                  const CorpusStats& stats, const Bm25Params& params = {});

/// |multiset intersection| / size of the smaller multiset, over normalized
/// words. Throws std::invalid_argument when either side has no words.
double lexical_overlap(std::string_view a, std::string_view b);

}  // namespace pipebench::retrieval

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/curation/simhash.hpp"

#include <array>
#include <bit>
#include <map>
#include <stdexcept>
#include <string>

#include "pipebench/common/text.hpp"

namespace pipebench::curation {

SimhashFingerprint simhash64(std::string_view input) {
  auto tokens = text::words(input);
  if (tokens.empty()) throw std::invalid_argument("simhash64: text has no words");
  std::map<std::string, std::int64_t> freq;
  for (auto& t : tokens) ++freq[std::move(t)];

  std::array<std::int64_t, 64> votes{};
  for (const auto& [token, weight] : freq) {
    const std::uint64_t h = text::feature_hash(token);
    for (int bit = 0; bit < 64; ++bit) votes[bit] += ((h >> bit) & 1U) ? weight : -weight;
  }
  SimhashFingerprint fp;
  for (int bit = 0; bit < 64; ++bit) {
    if (votes[bit] > 0) fp.bits |= (std::uint64_t{1} << bit);
  }
  return fp;
}

int hamming_distance(SimhashFingerprint a, SimhashFingerprint b) { return std::popcount(a.bits ^ b.bits); }

double simhash_similarity(SimhashFingerprint a, SimhashFingerprint b) {
  return 1.0 - static_cast<double>(hamming_distance(a, b)) / 64.0;
}

}  // namespace pipebench::curation

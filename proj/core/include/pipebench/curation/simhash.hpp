// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace pipebench::curation {

struct SimhashFingerprint {
  std::uint64_t bits = 0;

  bool operator==(const SimhashFingerprint&) const = default;
};

/// 64-bit simHash over lowercase word unigrams weighted by frequency. Bit i
/// is set iff the weighted sum of +1/-1 votes from bit i of every feature
/// hash is positive. Throws std::invalid_argument for text with no words.
SimhashFingerprint simhash64(std::string_view text);

int hamming_distance(SimhashFingerprint a, SimhashFingerprint b);

/// 1 - hamming/64.
double simhash_similarity(SimhashFingerprint a, SimhashFingerprint b);

}  // namespace pipebench::curation

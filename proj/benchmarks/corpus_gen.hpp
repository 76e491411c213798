// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "pipebench/common/rng.hpp"

namespace pipebench::bench {

inline std::string random_sentence(DeterministicRng& rng, std::size_t words) {
  static constexpr std::array<const char*, 24> kVocab = {
      "oled",   "backplane", "quantum", "dot",      "thin",    "film",      "transistor", "mobility",
      "pixel",  "driver",    "exciton", "lifetime", "emitter", "efficiency", "roll-off",  "host",
      "dopant", "layer",     "cathode", "anode",    "panel",   "mura",      "burn-in",    "gamma"};
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += kVocab[rng.below(kVocab.size())];
  }
  return out;
}

inline std::vector<std::string> random_corpus(std::size_t n, std::size_t words, std::uint64_t seed) {
  DeterministicRng rng(seed);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_sentence(rng, words));
  return out;
}

}  // namespace pipebench::bench

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/common/rng.hpp"

#include <stdexcept>

#include "pipebench/common/text.hpp"

namespace pipebench {

std::uint64_t DeterministicRng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t DeterministicRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("DeterministicRng::below: bound must be > 0");
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

double DeterministicRng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  return text::mix64(base ^ text::fnv1a64(label));
}

}  // namespace pipebench

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pipebench::text {

/// Unicode NFC normalization of a UTF-8 string. Invalid UTF-8 sequences are
/// replaced with U+FFFD.
std::string nfc(std::string_view utf8);

/// Lowercase word tokens: NFC, full case folding, then maximal runs of
/// letters/digits. Ideographic characters are emitted one per token so that
/// unsegmented CJK text still yields word-level features.
std::vector<std::string> words(std::string_view utf8);

bool is_blank(std::string_view s);
std::string trim(std::string_view s);

/// Splits on sentence terminators (. ! ? and their full-width forms) and on
/// newlines. Empty fragments are dropped; terminators stay attached.
std::vector<std::string> split_sentences(std::string_view s);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// splitmix64 finalizer; bijective avalanche over 64 bits.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit hash used for simHash features and embedding buckets.
inline std::uint64_t feature_hash(std::string_view token) { return mix64(fnv1a64(token)); }

std::string hex64(std::uint64_t v);
std::optional<std::uint64_t> parse_hex64(std::string_view s);

/// 128-bit content hash (32 hex chars) over length-prefixed parts.
std::string content_hash(const std::vector<std::string_view>& parts);

}  // namespace pipebench::text

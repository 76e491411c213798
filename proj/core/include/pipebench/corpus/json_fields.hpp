// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

namespace pipebench::corpus {

/// Thrown when a serialized record does not match its schema.
class RecordFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-way mapping between an enum and its wire names.
template <class E, std::size_t N>
struct EnumNames {
  std::array<std::pair<E, std::string_view>, N> entries;

  constexpr std::string_view name(E value) const {
    for (const auto& [e, n] : entries) {
      if (e == value) return n;
    }
    return "?";
  }
  constexpr std::optional<E> parse(std::string_view s) const {
    for (const auto& [e, n] : entries) {
      if (n == s) return e;
    }
    return std::nullopt;
  }
};

/// Reads fields out of a JSON object while tracking which keys were consumed,
/// so that unknown keys can be carried through a round-trip untouched.
class FieldReader {
 public:
  explicit FieldReader(const nlohmann::json& j);

  std::string text(std::string_view key);  // required, NFC-normalized
  std::optional<std::string> opt_text(std::string_view key);
  double real(std::string_view key);
  std::optional<double> opt_real(std::string_view key);
  std::int64_t integer(std::string_view key);
  std::optional<std::int64_t> opt_integer(std::string_view key);
  bool boolean(std::string_view key);
  std::optional<std::uint64_t> opt_hex64(std::string_view key);
  const nlohmann::json& raw(std::string_view key);
  const nlohmann::json* opt_raw(std::string_view key);

  template <class E, std::size_t N>
  E enumerated(std::string_view key, const EnumNames<E, N>& names) {
    std::string s = text(key);
    auto v = names.parse(s);
    if (!v) fail(key, "unknown value '" + s + "'");
    return *v;
  }
  template <class E, std::size_t N>
  std::optional<E> opt_enumerated(std::string_view key, const EnumNames<E, N>& names) {
    auto s = opt_text(key);
    if (!s) return std::nullopt;
    auto v = names.parse(*s);
    if (!v) fail(key, "unknown value '" + *s + "'");
    return v;
  }

  /// Unconsumed keys, excluding the line envelope ("kind", "schema").
  nlohmann::json rest() const;

  [[noreturn]] static void fail(std::string_view key, const std::string& what);

 private:
  const nlohmann::json& j_;
  std::set<std::string, std::less<>> consumed_;
};

/// Starts an output object from preserved unknown fields.
inline nlohmann::json with_extra(const nlohmann::json& extra) {
  return extra.is_object() ? extra : nlohmann::json::object();
}

}  // namespace pipebench::corpus

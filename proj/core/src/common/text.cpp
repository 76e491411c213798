// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/common/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <array>
#include <cctype>
#include <stdexcept>

namespace pipebench::text {
namespace {

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *n;
}

icu::UnicodeString normalized(std::string_view utf8) {
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc_instance().normalize(src, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  return out;
}

bool is_word_char(UChar32 c) {
  return u_isalnum(c) || u_hasBinaryProperty(c, UCHAR_ALPHABETIC) ||
         u_getIntPropertyValue(c, UCHAR_GENERAL_CATEGORY) == U_NON_SPACING_MARK;
}

}  // namespace

std::string nfc(std::string_view utf8) {
  // ASCII is always NFC; skip ICU for the common case.
  bool ascii = true;
  for (unsigned char c : utf8) {
    if (c >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) return std::string(utf8);
  std::string out;
  normalized(utf8).toUTF8String(out);
  return out;
}

std::vector<std::string> words(std::string_view utf8) {
  icu::UnicodeString s = normalized(utf8);
  s.foldCase();
  UErrorCode status = U_ZERO_ERROR;
  s = nfc_instance().normalize(s, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");

  std::vector<std::string> out;
  icu::UnicodeString current;
  auto flush = [&] {
    if (!current.isEmpty()) {
      std::string w;
      current.toUTF8String(w);
      out.push_back(std::move(w));
      current.remove();
    }
  };
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    i += U16_LENGTH(c);
    if (u_hasBinaryProperty(c, UCHAR_IDEOGRAPHIC)) {
      flush();
      current.append(c);
      flush();
    } else if (is_word_char(c)) {
      current.append(c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

bool is_blank(std::string_view s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_sentences(std::string_view s) {
  static constexpr std::array<std::string_view, 3> kWideTerminators = {"\xE3\x80\x82", "\xEF\xBC\x81",
                                                                        "\xEF\xBC\x9F"};
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    std::string t = trim(current);
    if (!t.empty()) out.push_back(std::move(t));
    current.clear();
  };
  for (size_t i = 0; i < s.size();) {
    char c = s[i];
    if (c == '\n') {
      flush();
      ++i;
      continue;
    }
    bool wide = false;
    for (auto term : kWideTerminators) {
      if (s.substr(i, term.size()) == term) {
        current.append(term);
        i += term.size();
        wide = true;
        break;
      }
    }
    if (wide) {
      flush();
      continue;
    }
    current.push_back(c);
    ++i;
    if (c == '.' || c == '!' || c == '?') {
      // Decimal points ("3.5") do not end a sentence.
      bool digit_follows = i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
      if (!digit_follows) flush();
    }
  }
  flush();
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::optional<std::uint64_t> parse_hex64(std::string_view s) {
  if (s.starts_with("0x")) s.remove_prefix(2);
  if (s.empty() || s.size() > 16) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else return std::nullopt;
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return v;
}

std::string content_hash(const std::vector<std::string_view>& parts) {
  std::uint64_t a = 0xcbf29ce484222325ULL;
  std::uint64_t b = 0x84222325cbf29ce4ULL;
  for (auto p : parts) {
    std::string len = std::to_string(p.size()) + ":";
    a = fnv1a64(len, a);
    a = fnv1a64(p, a);
    b = fnv1a64(p, fnv1a64(len, b ^ 0x5bd1e995ULL));
  }
  return hex64(mix64(a)) + hex64(mix64(b ^ a));
}

}  // namespace pipebench::text

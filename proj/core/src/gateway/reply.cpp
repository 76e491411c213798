// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/gateway/reply.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "pipebench/common/text.hpp"

namespace pipebench::gateway::reply {
namespace {

std::vector<std::string_view> lines(std::string_view s) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) nl = s.size();
    out.push_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::string_view strip_decoration(std::string_view line) {
  while (!line.empty() && (std::isspace(static_cast<unsigned char>(line.front())) || line.front() == '*' ||
                           line.front() == '#' || line.front() == '_')) {
    line.remove_prefix(1);
  }
  return line;
}

// Returns the value when `line` is `key: value` (any case, optional emphasis).
std::optional<std::string_view> match_key(std::string_view line, std::string_view key) {
  line = strip_decoration(line);
  if (line.size() < key.size()) return std::nullopt;
  for (size_t i = 0; i < key.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(line[i])) != std::tolower(static_cast<unsigned char>(key[i]))) {
      return std::nullopt;
    }
  }
  line.remove_prefix(key.size());
  while (!line.empty() && (line.front() == '*' || line.front() == '_')) line.remove_prefix(1);
  if (line.empty() || line.front() != ':') return std::nullopt;
  line.remove_prefix(1);
  while (!line.empty() && (line.front() == '*' || line.front() == '_')) line.remove_prefix(1);
  return line;
}

}  // namespace

std::optional<std::string> field(std::string_view r, std::string_view key) {
  for (auto l : lines(r)) {
    if (auto v = match_key(l, key)) return text::trim(*v);
  }
  return std::nullopt;
}

std::vector<std::string> fields(std::string_view r, std::string_view key) {
  std::vector<std::string> out;
  for (auto l : lines(r)) {
    if (auto v = match_key(l, key)) out.push_back(text::trim(*v));
  }
  return out;
}

std::optional<std::string> tail(std::string_view r, std::string_view key) {
  auto ls = lines(r);
  for (size_t i = 0; i < ls.size(); ++i) {
    if (auto v = match_key(ls[i], key)) {
      std::string out(*v);
      for (size_t k = i + 1; k < ls.size(); ++k) {
        out += '\n';
        out += ls[k];
      }
      return text::trim(out);
    }
  }
  return std::nullopt;
}

std::vector<std::string> bullets(std::string_view r) {
  std::vector<std::string> out;
  for (auto l : lines(r)) {
    std::string_view t = l;
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    if (t.starts_with("- ") || t.starts_with("* ")) {
      t.remove_prefix(2);
    } else {
      size_t i = 0;
      while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
      if (i == 0 || i + 1 >= t.size() || (t[i] != '.' && t[i] != ')') || t[i + 1] != ' ') continue;
      t.remove_prefix(i + 2);
    }
    std::string item = text::trim(t);
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= value.size()) {
    size_t sep = value.find(',', start);
    if (sep == std::string_view::npos) sep = value.size();
    std::string item = text::trim(value.substr(start, sep - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = sep + 1;
  }
  return out;
}

std::optional<double> number(std::string_view s) {
  std::string t = text::trim(s);
  // Accept "7", "7.5", "7/10".
  if (auto slash = t.find('/'); slash != std::string::npos) t = text::trim(std::string_view(t).substr(0, slash));
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> integer(std::string_view s) {
  std::string t = text::trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace pipebench::gateway::reply

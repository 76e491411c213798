// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

/// Parsers for the line-oriented reply protocol used by every prompt:
/// `KEY: value` lines and `- item` bullet lists. Keys match
/// case-insensitively and tolerate markdown emphasis around them.
namespace pipebench::gateway::reply {

std::optional<std::string> field(std::string_view reply, std::string_view key);
std::vector<std::string> fields(std::string_view reply, std::string_view key);
/// Text following `KEY:` up to the end of the reply (multi-line values).
std::optional<std::string> tail(std::string_view reply, std::string_view key);
std::vector<std::string> bullets(std::string_view reply);
std::vector<std::string> split_list(std::string_view value);
std::optional<double> number(std::string_view s);
std::optional<long long> integer(std::string_view s);
std::string lower(std::string_view s);

}  // namespace pipebench::gateway::reply

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "pipebench/corpus/records.hpp"

namespace pipebench::corpus {

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { io, validation, malformed, integrity };

  DatasetError(Kind kind, std::string message, std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(std::move(message)), kind_(kind), position_(position) {}

  Kind kind() const { return kind_; }
  /// Record index (validation) or 1-based line number (malformed).
  std::optional<std::size_t> position() const { return position_; }

 private:
  Kind kind_;
  std::optional<std::size_t> position_;
};

struct ManifestMeta {
  std::optional<std::uint64_t> seed;
  std::string gateway_profile;
};

struct DatasetManifest {
  static constexpr std::string_view kind = "manifest";

  std::string name;
  std::string record_kind;
  std::size_t count = 0;
  int schema_version = kSchemaVersion;
  std::optional<std::uint64_t> seed;
  std::string gateway_profile;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const DatasetManifest&) const = default;
};

void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

template <Record R>
struct Dataset {
  std::vector<R> records;
  DatasetManifest manifest;
};

/// `<dir>/<stem>.manifest` beside the dataset file.
std::filesystem::path manifest_path(const std::filesystem::path& dataset);

/// One canonical line (no trailing newline) for a record.
template <Record R>
std::string encode_line(const R& r) {
  nlohmann::json j;
  to_json(j, r);
  j["kind"] = std::string(R::kind);
  j["schema"] = kSchemaVersion;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

template <Record R>
R decode_line(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line);
  if (!j.is_object()) throw RecordFormatError("line is not a JSON object");
  auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string() || kind->get<std::string>() != R::kind) {
    throw RecordFormatError("expected kind '" + std::string(R::kind) + "'");
  }
  auto schema = j.find("schema");
  if (schema != j.end() && (!schema->is_number_integer() || schema->get<int>() > kSchemaVersion)) {
    throw RecordFormatError("unsupported schema version");
  }
  R r;
  from_json(j, r);
  return r;
}

namespace detail {

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines,
                 const DatasetManifest& manifest);

struct RawLines {
  std::vector<std::string> lines;
  DatasetManifest manifest;
};
RawLines read_lines(const std::filesystem::path& path, std::string_view expected_kind);

std::string describe(const std::vector<Violation>& violations);

/// Appends one line and bumps the manifest count (creating both if absent).
void append_line(const std::filesystem::path& path, const std::string& line, std::string_view kind);

}  // namespace detail

/// Validates every record, then writes one canonical line per record and the
/// manifest sidecar. Ids must be unique within the dataset.
template <Record R>
DatasetManifest write_dataset(std::span<const R> records, const std::filesystem::path& path,
                              const ManifestMeta& meta = {}) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto violations = validate_record(records[i]);
    if (!violations.empty()) {
      throw DatasetError(DatasetError::Kind::validation,
                         "record " + std::to_string(i) + ": " + detail::describe(violations), i);
    }
    if constexpr (requires { records[i].id; }) {
      if (!ids.insert(records[i].id).second) {
        throw DatasetError(DatasetError::Kind::validation,
                           "record " + std::to_string(i) + ": field 'id': duplicate '" + records[i].id + "'", i);
      }
    }
    lines.push_back(encode_line(records[i]));
  }
  DatasetManifest m;
  m.name = path.stem().string();
  m.record_kind = std::string(R::kind);
  m.count = records.size();
  m.seed = meta.seed;
  m.gateway_profile = meta.gateway_profile;
  detail::write_lines(path, lines, m);
  return m;
}

template <Record R>
DatasetManifest write_dataset(const std::vector<R>& records, const std::filesystem::path& path,
                              const ManifestMeta& meta = {}) {
  return write_dataset(std::span<const R>(records), path, meta);
}

/// Reads a dataset and checks it against its manifest.
template <Record R>
Dataset<R> read_dataset(const std::filesystem::path& path) {
  detail::RawLines raw = detail::read_lines(path, R::kind);
  Dataset<R> out;
  out.manifest = std::move(raw.manifest);
  out.records.reserve(raw.lines.size());
  for (std::size_t i = 0; i < raw.lines.size(); ++i) {
    try {
      out.records.push_back(decode_line<R>(raw.lines[i]));
    } catch (const std::exception& e) {
      throw DatasetError(DatasetError::Kind::malformed,
                         path.string() + ":" + std::to_string(i + 1) + ": " + e.what(), i + 1);
    }
  }
  return out;
}

/// Validates and appends one record to an append-only dataset.
template <Record R>
void append_record(const R& record, const std::filesystem::path& path) {
  auto violations = validate_record(record);
  if (!violations.empty()) throw DatasetError(DatasetError::Kind::validation, detail::describe(violations));
  detail::append_line(path, encode_line(record), R::kind);
}

}  // namespace pipebench::corpus

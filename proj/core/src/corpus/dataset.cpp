// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/corpus/dataset.hpp"

#include <fstream>
#include <sstream>

#include "pipebench/common/text.hpp"

namespace pipebench::corpus {

using nlohmann::json;
namespace fs = std::filesystem;

void to_json(json& j, const DatasetManifest& m) {
  j = with_extra(m.extra);
  j["name"] = m.name;
  j["record_kind"] = m.record_kind;
  j["count"] = m.count;
  j["schema_version"] = m.schema_version;
  json created = json::object();
  if (m.seed) created["seed"] = *m.seed;
  created["gateway_profile"] = m.gateway_profile;
  j["created"] = created;
}

void from_json(const json& j, DatasetManifest& m) {
  FieldReader f(j);
  m.name = f.text("name");
  m.record_kind = f.text("record_kind");
  auto count = f.integer("count");
  if (count < 0) FieldReader::fail("count", "must be >= 0");
  m.count = static_cast<std::size_t>(count);
  m.schema_version = static_cast<int>(f.integer("schema_version"));
  const json& created = f.raw("created");
  if (!created.is_object()) FieldReader::fail("created", "expected object");
  if (auto it = created.find("seed"); it != created.end() && it->is_number_unsigned()) m.seed = it->get<std::uint64_t>();
  if (auto it = created.find("gateway_profile"); it != created.end() && it->is_string()) {
    m.gateway_profile = it->get<std::string>();
  }
  m.extra = f.rest();
}

fs::path manifest_path(const fs::path& dataset) {
  fs::path p = dataset;
  p.replace_extension(".manifest");
  return p;
}

namespace detail {

std::string describe(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += "field '" + v.field + "': " + v.message;
  }
  return out;
}

namespace {

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError(DatasetError::Kind::io, "cannot open '" + path.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw DatasetError(DatasetError::Kind::io, "write to '" + path.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DatasetError(DatasetError::Kind::io, "cannot move dataset into place at '" + path.string() + "'");
}

}  // namespace

void write_lines(const fs::path& path, const std::vector<std::string>& lines, const DatasetManifest& manifest) {
  std::string body;
  for (const auto& l : lines) {
    body += l;
    body += '\n';
  }
  write_file(path, body);
  json mj;
  to_json(mj, manifest);
  mj["kind"] = std::string(DatasetManifest::kind);
  mj["schema"] = kSchemaVersion;
  write_file(manifest_path(path), mj.dump() + "\n");
}

void append_line(const fs::path& path, const std::string& line, std::string_view kind) {
  DatasetManifest m;
  const fs::path mpath = manifest_path(path);
  if (fs::exists(mpath)) {
    std::ifstream min(mpath, std::ios::binary);
    std::string mline;
    std::getline(min, mline);
    try {
      from_json(json::parse(mline), m);
    } catch (const std::exception& e) {
      throw DatasetError(DatasetError::Kind::integrity, "unreadable manifest '" + mpath.string() + "': " + e.what());
    }
  } else {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    m.name = path.stem().string();
    m.record_kind = std::string(kind);
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw DatasetError(DatasetError::Kind::io, "cannot append to '" + path.string() + "'");
    out << line << '\n';
    out.flush();
    if (!out) throw DatasetError(DatasetError::Kind::io, "append to '" + path.string() + "' failed");
  }
  ++m.count;
  json mj;
  to_json(mj, m);
  mj["kind"] = std::string(DatasetManifest::kind);
  mj["schema"] = kSchemaVersion;
  write_file(mpath, mj.dump() + "\n");
}

RawLines read_lines(const fs::path& path, std::string_view expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetError::Kind::io, "cannot open dataset '" + path.string() + "'");
  RawLines out;
  std::string line;
  while (std::getline(in, line)) out.lines.push_back(line);

  fs::path mpath = manifest_path(path);
  std::ifstream min(mpath, std::ios::binary);
  if (!min) throw DatasetError(DatasetError::Kind::integrity, "missing manifest '" + mpath.string() + "'");
  std::string mline;
  std::getline(min, mline);
  try {
    json mj = json::parse(mline);
    from_json(mj, out.manifest);
  } catch (const std::exception& e) {
    throw DatasetError(DatasetError::Kind::integrity, "unreadable manifest '" + mpath.string() + "': " + e.what());
  }
  if (out.manifest.record_kind != expected_kind) {
    throw DatasetError(DatasetError::Kind::integrity, "manifest '" + mpath.string() + "' declares kind '" +
                                                          out.manifest.record_kind + "', expected '" +
                                                          std::string(expected_kind) + "'");
  }
  if (out.manifest.count != out.lines.size()) {
    throw DatasetError(DatasetError::Kind::integrity,
                       "manifest count " + std::to_string(out.manifest.count) + " does not match " +
                           std::to_string(out.lines.size()) + " lines in '" + path.string() + "'");
  }
  return out;
}

}  // namespace detail
}  // namespace pipebench::corpus

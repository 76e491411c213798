// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pipebench/corpus/records.hpp"
#include "pipebench/gateway/types.hpp"

namespace pipebench::app {

/// Raised for unreadable or invalid configuration; `violations()` carries
/// field paths such as "stages.eval.alpha".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::vector<corpus::Violation> violations = {})
      : std::runtime_error(what), violations_(std::move(violations)) {}
  const std::vector<corpus::Violation>& violations() const { return violations_; }

 private:
  std::vector<corpus::Violation> violations_;
};

/// Stage names accepted by run_stage, in pipeline order where applicable.
const std::vector<std::string>& stage_names();
/// The stages `pipeline` runs, in order.
const std::vector<std::string>& pipeline_stages();

/// Every knob with its default. User files are merged over this; keys that
/// do not appear here are violations.
nlohmann::json default_config();

/// A validated run configuration. Paths are absolute (relative ones resolve
/// against the config file's directory).
struct RunConfig {
  std::filesystem::path source;    // config file, empty for in-memory configs
  std::filesystem::path base_dir;  // directory relative paths resolve against
  nlohmann::json doc;              // merged document, paths as written

  std::uint64_t seed() const;
  std::size_t max_workers() const;
  std::filesystem::path output_dir() const;
  std::filesystem::path prompts_path() const;
  std::map<std::string, gateway::BackendProfile> profiles() const;
  /// Profile name bound to a role.
  std::string role(const std::string& name) const;
  std::vector<std::string> role_list(const std::string& name) const;
  const nlohmann::json& stage(const std::string& name) const;
  std::filesystem::path resolve(const std::string& path) const;

  /// The document with every path made absolute; written into run manifests.
  nlohmann::json snapshot() const;
};

/// Field-precise violations; empty means valid. `base_dir` anchors relative
/// paths for the existence checks.
std::vector<corpus::Violation> validate_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads, merges over defaults and validates. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

struct Overrides {
  std::optional<std::uint64_t> seed;
  bool mock = false;  // every profile uses the mock backend
  std::optional<std::filesystem::path> output_dir;
};
void apply_overrides(RunConfig& cfg, const Overrides& o);

}  // namespace pipebench::app

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pipebench/gateway/gateway.hpp"
#include "pipebench/gateway/mock_backend.hpp"
#include "pipebench/gateway/prompts.hpp"

namespace pipebench::testing {

inline std::filesystem::path source_dir() { return PIPEBENCH_SOURCE_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("pipebench-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// The shipped prompt library.
inline const gateway::PromptLibrary& prompts() {
  static const gateway::PromptLibrary lib = gateway::PromptLibrary::load(source_dir() / "config" / "prompts.json");
  return lib;
}

inline gateway::BackendProfile mock_profile(const std::string& name, int max_in_flight = 4) {
  gateway::BackendProfile p;
  p.name = name;
  p.model = name + "-model";
  p.max_in_flight = max_in_flight;
  return p;
}

/// Gateway over mock backends, one per name, with optional scripted rules.
inline std::unique_ptr<gateway::Gateway> mock_gateway(const std::vector<std::string>& names,
                                                      std::vector<gateway::MockRule> rules = {}, int dims = 1024) {
  auto gw = std::make_unique<gateway::Gateway>();
  for (const auto& n : names) {
    auto p = mock_profile(n);
    p.embedding_dims = dims;
    gw->add_profile(p, std::make_shared<gateway::MockBackend>(rules, dims, p.model));
  }
  return gw;
}

inline gateway::MockRule rule(std::string task, std::map<std::string, std::string> when, std::string output) {
  gateway::MockRule r;
  r.task = std::move(task);
  r.when = std::move(when);
  r.outputs.push_back(std::move(output));
  return r;
}

}  // namespace pipebench::testing

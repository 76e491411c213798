// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "pipebench/curation/llm_stages.hpp"

namespace pipebench::evalengine {

struct ReferenceSource {
  std::string id;
  std::string text;
};

struct StandardizedReference {
  std::string text;
  std::vector<std::string> provenance;  // source ids, input order
};

/// Consolidates one or more raw references into a single ground truth.
StandardizedReference standardize_reference(const std::vector<ReferenceSource>& sources, const curation::StageCall& call);

struct Segment {
  std::size_t begin = 0;  // byte offsets into the input, [begin, end)
  std::size_t end = 0;
};

/// Blank-line separated paragraphs, trimmed of surrounding whitespace.
std::vector<Segment> segment_paragraphs(std::string_view text);

struct RefinedReference {
  std::string text;
  std::vector<Segment> removed;
};

/// Drops the segments the model marks as quotations or summaries. With
/// nothing removed the output equals the input exactly.
RefinedReference refine_reference(const std::string& reference, const curation::StageCall& call);

}  // namespace pipebench::evalengine

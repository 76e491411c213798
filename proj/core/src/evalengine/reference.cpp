// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/evalengine/reference.hpp"

#include <set>
#include <stdexcept>

#include "pipebench/common/text.hpp"
#include "pipebench/gateway/reply.hpp"

namespace pipebench::evalengine {

namespace reply = gateway::reply;

StandardizedReference standardize_reference(const std::vector<ReferenceSource>& sources, const curation::StageCall& call) {
  if (sources.empty()) throw std::invalid_argument("standardize_reference: no sources");
  std::map<std::string, std::string> vars{{"source_count", std::to_string(sources.size())}};
  StandardizedReference out;
  std::string block;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    block += "[" + std::to_string(i + 1) + "] " + sources[i].text + "\n";
    if (text::is_blank(sources[i].text)) throw std::invalid_argument("standardize_reference: blank source " + sources[i].id);
    vars["source_" + std::to_string(i + 1)] = sources[i].text;
    out.provenance.push_back(sources[i].id);
  }
  vars["sources"] = block;
  auto req = call.prompts.render(gateway::tasks::kReferenceStandardize, vars, call.temperature);
  out.text = call.gw.generate(req, call.profile).text;
  return out;
}

std::vector<Segment> segment_paragraphs(std::string_view t) {
  std::vector<Segment> out;
  std::size_t i = 0;
  const std::size_t n = t.size();
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (i < n) {
    while (i < n && is_space(t[i])) ++i;
    if (i >= n) break;
    std::size_t start = i;
    std::size_t end = i;
    // A paragraph ends at a line that is blank.
    while (i < n) {
      std::size_t eol = t.find('\n', i);
      if (eol == std::string_view::npos) eol = n;
      std::string_view line = t.substr(i, eol - i);
      if (text::is_blank(line)) break;
      end = eol;
      i = eol < n ? eol + 1 : n;
    }
    while (end > start && is_space(t[end - 1])) --end;
    out.push_back({start, end});
  }
  return out;
}

RefinedReference refine_reference(const std::string& reference, const curation::StageCall& call) {
  if (text::is_blank(reference)) throw std::invalid_argument("refine_reference: empty reference");
  auto segments = segment_paragraphs(reference);
  std::map<std::string, std::string> vars{{"segment_count", std::to_string(segments.size())}};
  std::string block;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    vars["segment_" + std::to_string(i + 1)] = reference.substr(segments[i].begin, segments[i].end - segments[i].begin);
    block += "[" + std::to_string(i + 1) + "] " + vars["segment_" + std::to_string(i + 1)] + "\n";
  }
  vars["segments"] = block;
  auto req = call.prompts.render(gateway::tasks::kReferenceRefine, vars, call.temperature);
  auto field = reply::field(call.gw.generate(req, call.profile).text, "REMOVE");
  if (!field) throw std::runtime_error("refine_reference: no REMOVE line in output");

  std::set<std::size_t> drop;
  if (reply::lower(text::trim(*field)) != "none") {
    for (const auto& item : reply::split_list(*field)) {
      auto k = reply::integer(item);
      if (!k || *k < 1 || static_cast<std::size_t>(*k) > segments.size()) {
        throw std::runtime_error("refine_reference: segment '" + item + "' out of range");
      }
      drop.insert(static_cast<std::size_t>(*k - 1));
    }
  }

  RefinedReference out;
  if (drop.empty()) {
    out.text = reference;
    return out;
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (drop.contains(i)) {
      out.removed.push_back(segments[i]);
      continue;
    }
    if (!out.text.empty()) out.text += "\n\n";
    out.text += reference.substr(segments[i].begin, segments[i].end - segments[i].begin);
  }
  if (text::is_blank(out.text)) throw std::runtime_error("refine_reference: every segment removed");
  return out;
}

}  // namespace pipebench::evalengine

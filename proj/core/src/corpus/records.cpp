// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipebench/corpus/records.hpp"

#include <cmath>

#include "pipebench/common/text.hpp"

namespace pipebench::corpus {

using nlohmann::json;

// FieldReader ---------------------------------------------------------------

FieldReader::FieldReader(const json& j) : j_(j) {
  if (!j_.is_object()) throw RecordFormatError("record is not a JSON object");
}

void FieldReader::fail(std::string_view key, const std::string& what) {
  throw RecordFormatError("field '" + std::string(key) + "': " + what);
}

const json* FieldReader::opt_raw(std::string_view key) {
  auto it = j_.find(key);
  consumed_.emplace(key);
  if (it == j_.end() || it->is_null()) return nullptr;
  return &*it;
}

const json& FieldReader::raw(std::string_view key) {
  const json* v = opt_raw(key);
  if (v == nullptr) fail(key, "missing");
  return *v;
}

std::string FieldReader::text(std::string_view key) {
  auto v = opt_text(key);
  if (!v) fail(key, "missing");
  return *v;
}

std::optional<std::string> FieldReader::opt_text(std::string_view key) {
  const json* v = opt_raw(key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_string()) fail(key, "expected string");
  return text::nfc(v->get_ref<const std::string&>());
}

double FieldReader::real(std::string_view key) {
  auto v = opt_real(key);
  if (!v) fail(key, "missing");
  return *v;
}

std::optional<double> FieldReader::opt_real(std::string_view key) {
  const json* v = opt_raw(key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_number()) fail(key, "expected number");
  return v->get<double>();
}

std::int64_t FieldReader::integer(std::string_view key) {
  auto v = opt_integer(key);
  if (!v) fail(key, "missing");
  return *v;
}

std::optional<std::int64_t> FieldReader::opt_integer(std::string_view key) {
  const json* v = opt_raw(key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_number_integer()) fail(key, "expected integer");
  return v->get<std::int64_t>();
}

bool FieldReader::boolean(std::string_view key) {
  const json& v = raw(key);
  if (!v.is_boolean()) fail(key, "expected boolean");
  return v.get<bool>();
}

std::optional<std::uint64_t> FieldReader::opt_hex64(std::string_view key) {
  auto s = opt_text(key);
  if (!s) return std::nullopt;
  auto v = text::parse_hex64(*s);
  if (!v) fail(key, "expected 64-bit hex string");
  return v;
}

json FieldReader::rest() const {
  json out = json::object();
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (it.key() == "kind" || it.key() == "schema") continue;
    if (consumed_.count(it.key()) == 0) out[it.key()] = it.value();
  }
  return out;
}

void require_text(std::vector<Violation>& out, std::string_view field, std::string_view value) {
  if (text::is_blank(value)) out.push_back({std::string(field), "must be non-empty"});
}

// QuestionRecord ------------------------------------------------------------

void to_json(json& j, const QuestionRecord& r) {
  j = with_extra(r.extra);
  j["id"] = r.id;
  j["text"] = r.text;
  j["source"] = kQuestionSourceNames.name(r.source);
  if (r.domain_label) j["domain_label"] = *r.domain_label;
  if (r.complexity_band) j["complexity_band"] = kComplexityBandNames.name(*r.complexity_band);
  if (r.simhash) j["simhash"] = text::hex64(*r.simhash);
  if (r.embedding_ref) j["embedding_ref"] = *r.embedding_ref;
  if (r.reference_answer) j["reference_answer"] = *r.reference_answer;
}

void from_json(const json& j, QuestionRecord& r) {
  FieldReader f(j);
  r.id = f.text("id");
  r.text = f.text("text");
  r.source = f.enumerated("source", kQuestionSourceNames);
  r.domain_label = f.opt_text("domain_label");
  r.complexity_band = f.opt_enumerated("complexity_band", kComplexityBandNames);
  r.simhash = f.opt_hex64("simhash");
  r.embedding_ref = f.opt_text("embedding_ref");
  r.reference_answer = f.opt_text("reference_answer");
  r.extra = f.rest();
}

std::vector<Violation> validate_record(const QuestionRecord& r) {
  std::vector<Violation> v;
  require_text(v, "id", r.id);
  require_text(v, "text", r.text);
  if (r.domain_label && text::is_blank(*r.domain_label)) v.push_back({"domain_label", "must be non-empty when present"});
  return v;
}

// ResponseRecord ------------------------------------------------------------

void to_json(json& j, const ResponseRecord& r) {
  j = with_extra(r.extra);
  j["id"] = r.id;
  j["question_id"] = r.question_id;
  j["model_id"] = r.model_id;
  if (r.reasoning_text) j["reasoning_text"] = *r.reasoning_text;
  j["answer_text"] = r.answer_text;
  j["sampling_temperature"] = r.sampling_temperature;
}

void from_json(const json& j, ResponseRecord& r) {
  FieldReader f(j);
  r.id = f.text("id");
  r.question_id = f.text("question_id");
  r.model_id = f.text("model_id");
  r.reasoning_text = f.opt_text("reasoning_text");
  r.answer_text = f.text("answer_text");
  r.sampling_temperature = f.real("sampling_temperature");
  r.extra = f.rest();
}

std::vector<Violation> validate_record(const ResponseRecord& r) {
  std::vector<Violation> v;
  require_text(v, "id", r.id);
  require_text(v, "question_id", r.question_id);
  require_text(v, "model_id", r.model_id);
  require_text(v, "answer_text", r.answer_text);
  if (!std::isfinite(r.sampling_temperature) || r.sampling_temperature < 0) {
    v.push_back({"sampling_temperature", "must be finite and >= 0"});
  }
  return v;
}

// ChunkRecord ---------------------------------------------------------------

void to_json(json& j, const ChunkRecord& r) {
  j = with_extra(r.extra);
  j["id"] = r.id;
  j["doc_id"] = r.doc_id;
  j["position"] = r.position;
  j["text"] = r.text;
  j["chunk_kind"] = kChunkKindNames.name(r.chunk_kind);
  if (r.subdomain) j["subdomain"] = *r.subdomain;
}

void from_json(const json& j, ChunkRecord& r) {
  FieldReader f(j);
  r.id = f.text("id");
  r.doc_id = f.text("doc_id");
  r.position = f.integer("position");
  r.text = f.text("text");
  r.chunk_kind = f.opt_enumerated("chunk_kind", kChunkKindNames).value_or(ChunkKind::retrieved);
  r.subdomain = f.opt_text("subdomain");
  r.extra = f.rest();
}

std::vector<Violation> validate_record(const ChunkRecord& r) {
  std::vector<Violation> v;
  require_text(v, "id", r.id);
  require_text(v, "doc_id", r.doc_id);
  if (r.position < 0) v.push_back({"position", "must be >= 0"});
  require_text(v, "text", r.text);
  return v;
}

// RemovalRecord -------------------------------------------------------------

void to_json(json& j, const RemovalRecord& r) {
  j = with_extra(r.extra);
  j["id"] = r.id;
  j["stage"] = r.stage;
  j["reason"] = r.reason;
  j["detail"] = r.detail;
}

void from_json(const json& j, RemovalRecord& r) {
  FieldReader f(j);
  r.id = f.text("id");
  r.stage = f.text("stage");
  r.reason = f.text("reason");
  r.detail = f.opt_text("detail").value_or("");
  r.extra = f.rest();
}

std::vector<Violation> validate_record(const RemovalRecord& r) {
  std::vector<Violation> v;
  require_text(v, "id", r.id);
  require_text(v, "stage", r.stage);
  require_text(v, "reason", r.reason);
  return v;
}

}  // namespace pipebench::corpus

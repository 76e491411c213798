// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pipebench/corpus/json_fields.hpp"

namespace pipebench::corpus {

inline constexpr int kSchemaVersion = 1;

struct Violation {
  std::string field;
  std::string message;

  bool operator==(const Violation&) const = default;
};

enum class QuestionSource { user_system, expert, doc_extracted, paper_extracted };
enum class ComplexityBand { simple, intermediate, advanced };
enum class ChunkKind { oracle, random, retrieved };

inline constexpr EnumNames<QuestionSource, 4> kQuestionSourceNames{{{
    {QuestionSource::user_system, "user-system"},
    {QuestionSource::expert, "expert"},
    {QuestionSource::doc_extracted, "doc-extracted"},
    {QuestionSource::paper_extracted, "paper-extracted"},
}}};
inline constexpr EnumNames<ComplexityBand, 3> kComplexityBandNames{{{
    {ComplexityBand::simple, "simple"},
    {ComplexityBand::intermediate, "intermediate"},
    {ComplexityBand::advanced, "advanced"},
}}};
inline constexpr EnumNames<ChunkKind, 3> kChunkKindNames{{{
    {ChunkKind::oracle, "oracle"},
    {ChunkKind::random, "random"},
    {ChunkKind::retrieved, "retrieved"},
}}};

struct QuestionRecord {
  static constexpr std::string_view kind = "question";

  std::string id;
  std::string text;
  QuestionSource source = QuestionSource::user_system;
  std::optional<std::string> domain_label;
  std::optional<ComplexityBand> complexity_band;
  std::optional<std::uint64_t> simhash;
  std::optional<std::string> embedding_ref;
  // Needed by preference generation, which judges against a reference.
  std::optional<std::string> reference_answer;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const QuestionRecord&) const = default;
};

struct ResponseRecord {
  static constexpr std::string_view kind = "response";

  std::string id;
  std::string question_id;
  std::string model_id;
  std::optional<std::string> reasoning_text;
  std::string answer_text;
  double sampling_temperature = 0.0;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const ResponseRecord&) const = default;
};

struct ChunkRecord {
  static constexpr std::string_view kind = "chunk";

  std::string id;
  std::string doc_id;
  std::int64_t position = 0;
  std::string text;
  ChunkKind chunk_kind = ChunkKind::retrieved;
  std::optional<std::string> subdomain;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const ChunkRecord&) const = default;
};

/// Why a record left a pipeline stage. Every removal anywhere in the
/// pipeline is persisted as one of these.
struct RemovalRecord {
  static constexpr std::string_view kind = "removal";

  std::string id;  // id of the removed record
  std::string stage;
  std::string reason;
  std::string detail;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const RemovalRecord&) const = default;
};

void to_json(nlohmann::json& j, const QuestionRecord& r);
void from_json(const nlohmann::json& j, QuestionRecord& r);
void to_json(nlohmann::json& j, const ResponseRecord& r);
void from_json(const nlohmann::json& j, ResponseRecord& r);
void to_json(nlohmann::json& j, const ChunkRecord& r);
void from_json(const nlohmann::json& j, ChunkRecord& r);
void to_json(nlohmann::json& j, const RemovalRecord& r);
void from_json(const nlohmann::json& j, RemovalRecord& r);

std::vector<Violation> validate_record(const QuestionRecord& r);
std::vector<Violation> validate_record(const ResponseRecord& r);
std::vector<Violation> validate_record(const ChunkRecord& r);
std::vector<Violation> validate_record(const RemovalRecord& r);

/// A persistable record kind: has a wire kind tag, JSON conversions, and a
/// validator that reports every violation.
template <class R>
concept Record = std::default_initializable<R> && std::equality_comparable<R> &&
                 requires(const R& r, nlohmann::json& j) {
                   { R::kind } -> std::convertible_to<std::string_view>;
                   { validate_record(r) } -> std::same_as<std::vector<Violation>>;
                   to_json(j, r);
                 };

/// Appends a violation when a required string is blank.
void require_text(std::vector<Violation>& out, std::string_view field, std::string_view value);

}  // namespace pipebench::corpus

// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "pipebench/common/rng.hpp"
#include "pipebench/common/text.hpp"
#include "pipebench/corpus/dataset.hpp"
#include "test_support.hpp"

namespace pipebench::corpus {
namespace {

using pipebench::testing::TempDir;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

QuestionRecord question(std::string id, std::string text) {
  QuestionRecord q;
  q.id = std::move(id);
  q.text = std::move(text);
  return q;
}

std::string random_text(DeterministicRng& rng) {
  static const std::vector<std::string> pieces = {"OLED", "backplane", "с кириллицей", "\"quoted\"", "tab\there",
                                                  "line\nbreak", "量子点", "é", "{json}", "\\slash"};
  std::string out;
  auto n = 1 + rng.below(6);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += pieces[rng.below(pieces.size())];
  }
  return out;
}

QuestionRecord random_question(DeterministicRng& rng, int i) {
  QuestionRecord q = question("q" + std::to_string(i), random_text(rng));
  q.source = static_cast<QuestionSource>(rng.below(4));
  if (rng.coin()) q.domain_label = random_text(rng);
  if (rng.coin()) q.complexity_band = static_cast<ComplexityBand>(rng.below(3));
  if (rng.coin()) q.simhash = rng.next();
  if (rng.coin()) q.embedding_ref = "vec-" + std::to_string(rng.below(1000));
  if (rng.coin()) q.reference_answer = random_text(rng);
  if (rng.coin()) q.extra["annotator"] = random_text(rng);
  return q;
}

TEST(CorpusWrite, ManifestCountsRecords) {
  TempDir dir;
  std::vector<QuestionRecord> qs = {question("a", "one?"), question("b", "two?"), question("c", "three?")};
  auto m = write_dataset(qs, dir / "qs.jsonl", {.seed = 7, .gateway_profile = "mock"});
  EXPECT_EQ(m.count, 3u);
  EXPECT_EQ(m.record_kind, "question");
  EXPECT_EQ(m.name, "qs");
  auto back = read_dataset<QuestionRecord>(dir / "qs.jsonl");
  EXPECT_EQ(back.manifest, m);
  EXPECT_EQ(back.manifest.seed, 7u);
  EXPECT_TRUE(std::filesystem::exists(dir / "qs.manifest"));
}

TEST(CorpusWrite, EmptySequenceWritesEmptyFile) {
  TempDir dir;
  auto m = write_dataset(std::vector<QuestionRecord>{}, dir / "empty.jsonl");
  EXPECT_EQ(m.count, 0u);
  EXPECT_EQ(slurp(dir / "empty.jsonl"), "");
  EXPECT_TRUE(read_dataset<QuestionRecord>(dir / "empty.jsonl").records.empty());
}

TEST(CorpusWrite, InvalidRecordNamesIndex) {
  TempDir dir;
  std::vector<QuestionRecord> qs = {question("a", "fine?"), question("b", "")};
  try {
    write_dataset(qs, dir / "bad.jsonl");
    FAIL() << "expected a validation error";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.kind(), DatasetError::Kind::validation);
    EXPECT_EQ(e.position(), 1u);
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("text"), std::string::npos);
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "bad.jsonl"));
}

TEST(CorpusWrite, DuplicateIdsRejected) {
  TempDir dir;
  std::vector<QuestionRecord> qs = {question("a", "x?"), question("a", "y?")};
  EXPECT_THROW(write_dataset(qs, dir / "dup.jsonl"), DatasetError);
}

TEST(CorpusWrite, UnwritablePathIsIoError) {
  TempDir dir;
  std::ofstream(dir / "file") << "x";
  try {
    write_dataset(std::vector<QuestionRecord>{question("a", "x?")}, dir / "file" / "sub" / "qs.jsonl");
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.kind(), DatasetError::Kind::io);
  }
}

TEST(CorpusRead, RoundTripMixedRecords) {
  TempDir dir;
  DeterministicRng rng(11);
  std::vector<QuestionRecord> qs;
  for (int i = 0; i < 10; ++i) qs.push_back(random_question(rng, i));
  // Inputs are normalized on ingest, so compare against NFC text.
  for (auto& q : qs) q.text = text::nfc(q.text);
  write_dataset(qs, dir / "mixed.jsonl");
  auto back = read_dataset<QuestionRecord>(dir / "mixed.jsonl");
  ASSERT_EQ(back.records.size(), qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    auto expect = qs[i];
    if (expect.domain_label) expect.domain_label = text::nfc(*expect.domain_label);
    if (expect.reference_answer) expect.reference_answer = text::nfc(*expect.reference_answer);
    EXPECT_EQ(back.records[i], expect) << "record " << i;
  }
}

TEST(CorpusRead, RoundTripPropertyAllKinds) {
  TempDir dir;
  DeterministicRng rng(2026);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ResponseRecord> rs;
    std::vector<ChunkRecord> cs;
    std::vector<RemovalRecord> rm;
    for (int i = 0; i < 15; ++i) {
      ResponseRecord r;
      r.id = "r" + std::to_string(i);
      r.question_id = "q" + std::to_string(rng.below(5));
      r.model_id = "m" + std::to_string(rng.below(3));
      if (rng.coin()) r.reasoning_text = text::nfc(random_text(rng));
      r.answer_text = text::nfc(random_text(rng));
      r.sampling_temperature = static_cast<double>(rng.below(200)) / 100.0;
      rs.push_back(r);

      ChunkRecord c;
      c.id = "c" + std::to_string(i);
      c.doc_id = "d" + std::to_string(rng.below(3));
      c.position = static_cast<std::int64_t>(rng.below(50));
      c.text = text::nfc(random_text(rng));
      c.chunk_kind = static_cast<ChunkKind>(rng.below(3));
      if (rng.coin()) c.subdomain = text::nfc(random_text(rng));
      if (rng.coin()) c.extra["score"] = rng.unit();
      cs.push_back(c);

      RemovalRecord x;
      x.id = "x" + std::to_string(i);
      x.stage = "dedup";
      x.reason = "duplicate";
      x.detail = text::nfc(random_text(rng));
      rm.push_back(x);
    }
    write_dataset(rs, dir / "r.jsonl");
    write_dataset(cs, dir / "c.jsonl");
    write_dataset(rm, dir / "x.jsonl");
    EXPECT_EQ(read_dataset<ResponseRecord>(dir / "r.jsonl").records, rs);
    EXPECT_EQ(read_dataset<ChunkRecord>(dir / "c.jsonl").records, cs);
    EXPECT_EQ(read_dataset<RemovalRecord>(dir / "x.jsonl").records, rm);
  }
}

TEST(CorpusRead, ReserializationIsByteIdentical) {
  TempDir dir;
  DeterministicRng rng(5);
  std::vector<QuestionRecord> qs;
  for (int i = 0; i < 25; ++i) qs.push_back(random_question(rng, i));
  write_dataset(qs, dir / "a.jsonl");
  // Ingest normalizes text, so byte identity holds from the first read onward.
  auto back = read_dataset<QuestionRecord>(dir / "a.jsonl");
  write_dataset(back.records, dir / "b.jsonl");
  auto again = read_dataset<QuestionRecord>(dir / "b.jsonl");
  EXPECT_EQ(again.records, back.records);
  write_dataset(again.records, dir / "c.jsonl");
  EXPECT_EQ(slurp(dir / "b.jsonl"), slurp(dir / "c.jsonl"));
}

TEST(CorpusRead, UnknownFieldsPreserved) {
  TempDir dir;
  {
    std::ofstream out(dir / "u.jsonl");
    out << R"({"id":"q1","text":"Why?","source":"expert","future_field":{"a":[1,2]},"kind":"question","schema":1})"
        << "\n";
  }
  {
    std::ofstream out(dir / "u.manifest");
    out << R"({"name":"u","record_kind":"question","count":1,"schema_version":1,"created":{"gateway_profile":"mock"},"kind":"manifest","schema":1})";
  }
  auto back = read_dataset<QuestionRecord>(dir / "u.jsonl");
  ASSERT_EQ(back.records.size(), 1u);
  EXPECT_EQ(back.records[0].extra["future_field"]["a"][1], 2);
  write_dataset(back.records, dir / "v.jsonl");
  EXPECT_NE(slurp(dir / "v.jsonl").find("future_field"), std::string::npos);
}

TEST(CorpusRead, NfcAppliedOnIngest) {
  TempDir dir;
  std::vector<QuestionRecord> qs = {question("a", "café?")};
  write_dataset(qs, dir / "n.jsonl");
  auto back = read_dataset<QuestionRecord>(dir / "n.jsonl");
  EXPECT_EQ(back.records[0].text, "café?");
}

TEST(CorpusRead, TruncatedLastLineReportsLineNumber) {
  TempDir dir;
  std::vector<QuestionRecord> qs = {question("a", "one?"), question("b", "two?"), question("c", "three?")};
  write_dataset(qs, dir / "t.jsonl");
  std::string body = slurp(dir / "t.jsonl");
  while (!body.empty() && body.back() == '\n') body.pop_back();
  body.resize(body.size() - 10);
  std::ofstream(dir / "t.jsonl", std::ios::binary | std::ios::trunc) << body;
  try {
    read_dataset<QuestionRecord>(dir / "t.jsonl");
    FAIL() << "expected malformed error";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.kind(), DatasetError::Kind::malformed);
    EXPECT_EQ(e.position(), 3u);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
}

TEST(CorpusRead, ManifestCountMismatchIsIntegrityError) {
  TempDir dir;
  std::vector<QuestionRecord> qs;
  for (int i = 0; i < 4; ++i) qs.push_back(question("q" + std::to_string(i), "text?"));
  write_dataset(qs, dir / "m.jsonl");
  auto mj = nlohmann::json::parse(slurp(dir / "m.manifest"));
  mj["count"] = 5;
  std::ofstream(dir / "m.manifest", std::ios::trunc) << mj.dump();
  try {
    read_dataset<QuestionRecord>(dir / "m.jsonl");
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.kind(), DatasetError::Kind::integrity);
  }
}

TEST(CorpusRead, MissingManifestIsIntegrityError) {
  TempDir dir;
  write_dataset(std::vector<QuestionRecord>{question("a", "x?")}, dir / "m.jsonl");
  std::filesystem::remove(dir / "m.manifest");
  EXPECT_THROW(read_dataset<QuestionRecord>(dir / "m.jsonl"), DatasetError);
}

TEST(CorpusRead, WrongKindRejected) {
  TempDir dir;
  write_dataset(std::vector<QuestionRecord>{question("a", "x?")}, dir / "q.jsonl");
  EXPECT_THROW(read_dataset<ChunkRecord>(dir / "q.jsonl"), DatasetError);
}

TEST(CorpusRead, MissingFileIsIoError) {
  TempDir dir;
  try {
    read_dataset<QuestionRecord>(dir / "nope.jsonl");
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.kind(), DatasetError::Kind::io);
  }
}

TEST(CorpusAppend, AppendKeepsManifestInSync) {
  TempDir dir;
  auto path = dir / "log.jsonl";
  for (int i = 0; i < 3; ++i) append_record(question("q" + std::to_string(i), "x?"), path);
  auto back = read_dataset<QuestionRecord>(path);
  EXPECT_EQ(back.records.size(), 3u);
  EXPECT_EQ(back.manifest.count, 3u);
  EXPECT_EQ(back.records[2].id, "q2");
  EXPECT_THROW(append_record(question("", ""), path), DatasetError);
}

TEST(CorpusValidate, FullyPopulatedQuestionIsOk) {
  QuestionRecord q = question("q1", "How do OLED pixels age?");
  q.source = QuestionSource::expert;
  q.domain_label = "OLED";
  q.complexity_band = ComplexityBand::advanced;
  q.simhash = 0xdeadbeefULL;
  q.embedding_ref = "vec-1";
  EXPECT_TRUE(validate_record(q).empty());
}

TEST(CorpusValidate, EmptyIdAndTextGiveTwoViolations) {
  auto v = validate_record(question("", ""));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].field, "id");
  EXPECT_EQ(v[1].field, "text");
}

TEST(CorpusValidate, NegativeChunkPositionGivesOneViolation) {
  ChunkRecord c;
  c.id = "c";
  c.doc_id = "d";
  c.text = "body";
  c.position = -1;
  auto v = validate_record(c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "position");
}

TEST(CorpusValidate, ResponseRules) {
  ResponseRecord r;
  r.id = "r";
  r.question_id = "q";
  r.model_id = "m";
  r.answer_text = "";
  r.sampling_temperature = -0.5;
  auto v = validate_record(r);
  EXPECT_EQ(v.size(), 2u);
}

}  // namespace
}  // namespace pipebench::corpus

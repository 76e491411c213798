// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "corpus_gen.hpp"
#include "pipebench/common/text.hpp"
#include "pipebench/retrieval/bm25.hpp"

namespace {

using namespace pipebench;

void BM_CorpusStats(benchmark::State& state) {
  auto texts = bench::random_corpus(static_cast<std::size_t>(state.range(0)), 60, 3);
  for (auto _ : state) benchmark::DoNotOptimize(retrieval::CorpusStats::from_texts(texts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusStats)->Arg(100)->Arg(1000);

void BM_Bm25Score(benchmark::State& state) {
  auto texts = bench::random_corpus(1000, 60, 4);
  std::vector<std::vector<std::string>> docs;
  for (const auto& t : texts) docs.push_back(text::words(t));
  auto stats = retrieval::CorpusStats::build(docs);
  auto query = text::words("oled backplane exciton lifetime");
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(retrieval::bm25_score(query, docs[i++ % docs.size()], stats));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Bm25Score);

void BM_LexicalOverlap(benchmark::State& state) {
  auto texts = bench::random_corpus(64, 40, 5);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(retrieval::lexical_overlap(texts[i % 64], texts[(i + 7) % 64]));
    ++i;
  }
}
BENCHMARK(BM_LexicalOverlap);

}  // namespace

BENCHMARK_MAIN();

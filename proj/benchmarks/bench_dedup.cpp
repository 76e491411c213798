// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <cstdio>

#include "corpus_gen.hpp"
#include "pipebench/curation/dedup.hpp"

namespace {

using namespace pipebench;

std::vector<corpus::QuestionRecord> questions(std::size_t n) {
  auto texts = bench::random_corpus(n, 12, 6);
  std::vector<corpus::QuestionRecord> out;
  char id[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(id, sizeof id, "q%05zu", i);
    corpus::QuestionRecord q;
    q.id = id;
    q.text = texts[i] + "?";
    out.push_back(std::move(q));
  }
  return out;
}

void BM_SimhashDedupBand(benchmark::State& state) {
  auto qs = questions(static_cast<std::size_t>(state.range(0)));
  curation::Adjudicator distinct = [](const auto&, const auto&, double) { return curation::Adjudication::distinct; };
  for (auto _ : state) benchmark::DoNotOptimize(curation::simhash_dedup_band(qs, {}, distinct));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SimhashDedupBand)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

}  // namespace

BENCHMARK_MAIN();

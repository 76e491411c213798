// Copyright 2026 The pipebench Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "corpus_gen.hpp"
#include "pipebench/curation/simhash.hpp"

namespace {

using namespace pipebench;

void BM_Simhash64(benchmark::State& state) {
  auto texts = bench::random_corpus(256, static_cast<std::size_t>(state.range(0)), 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(curation::simhash64(texts[i++ % texts.size()]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Simhash64)->Arg(8)->Arg(32)->Arg(128);

void BM_SimhashSimilarity(benchmark::State& state) {
  auto texts = bench::random_corpus(256, 20, 2);
  std::vector<curation::SimhashFingerprint> fps;
  for (const auto& t : texts) fps.push_back(curation::simhash64(t));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(curation::simhash_similarity(fps[i % fps.size()], fps[(i + 1) % fps.size()]));
    ++i;
  }
}
BENCHMARK(BM_SimhashSimilarity);

}  // namespace

BENCHMARK_MAIN();
